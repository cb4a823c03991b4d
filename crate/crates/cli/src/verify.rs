use clap::{Args, ValueEnum};
use serde::Serialize;

use cover_sampler::cover::CoverAlgorithm;
use cover_sampler::instance::{generate_random_hypergraph, generate_random_instance, Hypergraph};
use cover_sampler::mpc::sparsify_hypergraph;
use cover_sampler::oracle::{f_approx_bound, hdelta_bound, matching_bound, measure_matching_ratio, measure_ratio};
use cover_sampler::schedule::validate_eps;
use cover_sampler::ssp::{
    builtin_adversaries, estimate_conditional_multiplicity, estimate_expected_rz, SspConfig, SspError, MIN_TRIALS,
};
use cover_sampler::stats::RunningStats;
use cover_sampler::trials::{fold_trials, Execution};

use crate::output::{emit, Format};
use crate::Status;

const EXEC: Execution = Execution::Parallel;
const SPARSIFY_TRIALS: u64 = 10_000;
const RATIO_TRIALS: u64 = 200;
const RATIO_INSTANCES: u64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// `E|R_z| <= 1 + 4 eps` in the sampling process.
    #[value(alias = "3.1")]
    ExpectedSize,
    /// `P(|R_z| > 1 | marked element in R_z) <= 6 eps`.
    #[value(alias = "3.3")]
    Conditional,
    /// Non-isolated vertices after edge sampling at most `p h |E|`.
    #[value(alias = "6.1")]
    Sparsify,
    /// Solver ratios against exact optima on a small corpus.
    Ratio,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Run one check; all of them when absent.
    #[arg(long, value_enum)]
    lemma: Option<Check>,
    /// Single eps instead of the default grid.
    #[arg(long)]
    eps: Option<f64>,
    /// Single process size instead of the default grid.
    #[arg(long)]
    n: Option<usize>,
    /// Adversary name; `identity` with `--lemma`, all of them otherwise.
    #[arg(long)]
    adversary: Option<String>,
    /// Runs per sampling-process cell.
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Debug, Serialize)]
struct Row {
    check: &'static str,
    params: String,
    trials: u64,
    estimate: f64,
    ci95: f64,
    bound: f64,
    pass: bool,
}

pub fn run(args: &VerifyArgs) -> anyhow::Result<Status> {
    if args.trials < MIN_TRIALS {
        return Err(SspError::InsufficientTrials { min: MIN_TRIALS, got: args.trials }.into());
    }
    if let Some(eps) = args.eps {
        validate_eps(eps)?;
    }
    let adversaries: Vec<_> = {
        let wanted = args.adversary.as_deref().or(args.lemma.map(|_| "identity"));
        let all = builtin_adversaries(0.0).into_iter().map(|(n, _)| n).collect::<Vec<_>>();
        match wanted {
            Some(name) if !all.contains(&name) => {
                anyhow::bail!("unknown adversary {name:?}; expected one of {}", all.join(", "))
            }
            Some(name) => vec![name],
            None => all,
        }
    };
    let checks = match args.lemma {
        Some(c) => vec![c],
        None => vec![Check::ExpectedSize, Check::Conditional, Check::Sparsify, Check::Ratio],
    };

    let mut rows = Vec::new();
    for check in checks {
        match check {
            Check::ExpectedSize => ssp_grid(args, &adversaries, &[0.05, 0.1, 0.25, 0.5], false, &mut rows)?,
            Check::Conditional => ssp_grid(args, &adversaries, &[0.05, 0.1, 0.25], true, &mut rows)?,
            Check::Sparsify => sparsify_grid(args, &mut rows),
            Check::Ratio => ratio_corpus(args, &mut rows)?,
        }
    }
    emit(&rows, args.format)?;
    let failed: Vec<&Row> = rows.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        eprintln!("FAILED {} [{}]: {:.4} +/- {:.4} vs bound {:.4}", r.check, r.params, r.estimate, r.ci95, r.bound);
    }
    Ok(if failed.is_empty() { Status::Ok } else { Status::StatisticalFailure })
}

fn ssp_grid(
    args: &VerifyArgs,
    adversaries: &[&str],
    eps_grid: &[f64],
    conditional: bool,
    rows: &mut Vec<Row>,
) -> anyhow::Result<()> {
    let eps_values = args.eps.map_or_else(|| eps_grid.to_vec(), |e| vec![e]);
    let sizes = args.n.map_or_else(|| vec![10, 100, 1000], |n| vec![n]);
    for &eps in &eps_values {
        for &n in &sizes {
            for (name, adversary) in builtin_adversaries(eps).into_iter().filter(|(n, _)| adversaries.contains(n)) {
                let cfg = SspConfig::new(n, eps, adversary, args.seed ^ n as u64)?;
                let (check, est, bound) = if conditional {
                    ("conditional", estimate_conditional_multiplicity(&cfg, args.trials, EXEC)?, 6.0 * eps)
                } else {
                    ("expected-size", estimate_expected_rz(&cfg, args.trials, EXEC)?, 1.0 + 4.0 * eps)
                };
                rows.push(Row {
                    check,
                    params: format!("eps={eps} n={n} adversary={name}"),
                    trials: est.samples,
                    estimate: est.mean,
                    ci95: est.ci95,
                    bound,
                    pass: est.mean - est.ci95 <= bound,
                });
            }
        }
    }
    Ok(())
}

fn sparsify_grid(args: &VerifyArgs, rows: &mut Vec<Row>) {
    let graphs: [(&str, Hypergraph); 2] = [
        ("random-30-60-3", generate_random_hypergraph(30, 60, 3, 1).expect("rank fits")),
        ("random-100-80-2", generate_random_hypergraph(100, 80, 2, 2).expect("rank fits")),
    ];
    for (name, hg) in &graphs {
        for p in [0.05, 0.1, 0.3] {
            let stats = fold_trials(
                args.seed,
                SPARSIFY_TRIALS,
                EXEC,
                RunningStats::new,
                |acc, _, rng| acc.push(sparsify_hypergraph(hg, p, rng).1 as f64),
                |mut a, b| {
                    a.merge(&b);
                    a
                },
            );
            let bound = p * hg.avg_rank() * hg.num_edges() as f64;
            rows.push(Row {
                check: "sparsify",
                params: format!("graph={name} p={p}"),
                trials: SPARSIFY_TRIALS,
                estimate: stats.mean(),
                ci95: stats.ci95(),
                bound,
                pass: stats.mean() <= bound + 3.0 * stats.std_err(),
            });
        }
    }
}

fn ratio_corpus(args: &VerifyArgs, rows: &mut Vec<Row>) -> anyhow::Result<()> {
    let eps = args.eps.unwrap_or(0.1);
    for i in 0..RATIO_INSTANCES {
        let f = 2 + (i % 3) as usize;
        let inst = generate_random_instance(12 + (i % 14) as usize, 30 + ((i * 7) % 51) as usize, f, 500 + i)?;
        let solvers = [
            ("ratio-f-bucketed", CoverAlgorithm::FBucketed, f_approx_bound(eps, inst.freq())),
            ("ratio-hdelta", CoverAlgorithm::HDelta { noise: 0.0 }, hdelta_bound(eps, inst.delta(), 0.0)?),
        ];
        for (check, alg, bound) in solvers {
            let r = measure_ratio(alg, &inst, eps, RATIO_TRIALS, args.seed + i, bound, EXEC)?;
            rows.push(Row {
                check,
                params: format!("eps={eps} instance={i} opt={}", r.opt),
                trials: r.trials,
                estimate: r.mean_ratio,
                ci95: r.ci95,
                bound,
                pass: r.pass,
            });
        }
        let h = f;
        let hg = generate_random_hypergraph(8 + (i % 20) as usize, 10 + (i % 16) as usize, h, 700 + i)?;
        let bound = matching_bound(eps, h);
        let r = measure_matching_ratio(&hg, eps, RATIO_TRIALS, args.seed + i, bound, EXEC)?;
        rows.push(Row {
            check: "ratio-match",
            params: format!("eps={eps} hypergraph={i} opt={}", r.opt),
            trials: r.trials,
            estimate: r.mean_ratio,
            ci95: r.ci95,
            bound,
            pass: r.pass,
        });
    }
    Ok(())
}
