use std::path::PathBuf;

use anyhow::bail;
use clap::{Args, ValueEnum};
use serde::Serialize;

use cover_sampler::cover::{effective_eps, verify_cover, CostCounters, CoverAlgorithm};
use cover_sampler::instance::{parse_hypergraph, parse_instance, to_hypergraph, Hypergraph};
use cover_sampler::matching::{verify_matching, MatchingSampler};
use cover_sampler::mpc::{amplify_matching, amplify_to_whp, simulate_mpc_f_approx, PlannerConstants};
use cover_sampler::schedule::validate_eps;
use cover_sampler::trials::{trial_rng, Execution};

use crate::output::{emit, Format};
use crate::{read_input, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    /// Element-by-element f-approximation.
    FOnline,
    /// Bucketed f-approximation with linear work.
    FBucketed,
    /// Size-threshold solver, `(1+eps) H_Delta` in expectation.
    Hdelta,
    /// Hypergraph matching.
    Match,
    /// Bucketed f-approximation run phase by phase with MPC round accounting.
    MpcSim,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::FOnline => "f-online",
            Algorithm::FBucketed => "f-bucketed",
            Algorithm::Hdelta => "hdelta",
            Algorithm::Match => "match",
            Algorithm::MpcSim => "mpc-sim",
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    alg: Algorithm,
    /// Parameter passed to the solver.
    #[arg(long, conflicts_with = "target_eps")]
    eps: Option<f64>,
    /// Target matching accuracy; the matcher runs with `eps = target / rank`.
    #[arg(long)]
    target_eps: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Run cover solvers at `eps / 4`.
    #[arg(long)]
    calibrated: bool,
    /// Relative over-estimate of set sizes for `hdelta`.
    #[arg(long, default_value_t = 0.0)]
    size_oracle_delta: f64,
    /// Independent runs; the best one is reported.
    #[arg(long, default_value_t = 1)]
    copies: u64,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    /// `p sc` instance, or `p hg` hypergraph for `match`.
    input: PathBuf,
}

#[derive(Debug, Serialize)]
struct SolveRow {
    algorithm: &'static str,
    eps: f64,
    seed: u64,
    copies: u64,
    best_copy: u64,
    size: usize,
    valid: bool,
    element_touches: u64,
    set_touches: u64,
    edge_touches: u64,
    steps_executed: u64,
    rebucket_events: u64,
    mpc_rounds: Option<usize>,
}

const DEFAULT_EPS: f64 = 0.1;

pub fn run(args: &SolveArgs) -> anyhow::Result<Status> {
    if args.copies == 0 {
        bail!("--copies must be at least 1");
    }
    if !(args.size_oracle_delta >= 0.0 && args.size_oracle_delta.is_finite()) {
        bail!("--size-oracle-delta must be a finite nonnegative number");
    }
    if args.target_eps.is_some() && args.alg != Algorithm::Match {
        bail!("--target-eps applies to --alg match only");
    }
    let text = read_input(&args.input)?;
    let row = if args.alg == Algorithm::Match {
        solve_matching(args, &text)?
    } else {
        solve_cover(args, &text)?
    };
    let valid = row.valid;
    emit(&[row], args.format)?;
    if valid {
        Ok(Status::Ok)
    } else {
        eprintln!("verification failed");
        Ok(Status::VerificationFailed)
    }
}

fn solve_cover(args: &SolveArgs, text: &str) -> anyhow::Result<SolveRow> {
    let inst = parse_instance(text)?;
    let eps = args.eps.unwrap_or(DEFAULT_EPS);
    validate_eps(eps)?;
    let eps = effective_eps(eps, args.calibrated);
    let (solver, mpc) = match args.alg {
        Algorithm::FOnline => (CoverAlgorithm::FOnline, false),
        Algorithm::FBucketed => (CoverAlgorithm::FBucketed, false),
        Algorithm::Hdelta => (CoverAlgorithm::HDelta { noise: args.size_oracle_delta }, false),
        // Equal seeds give equal covers, so the bucketed solver ranks the copies.
        Algorithm::MpcSim => (CoverAlgorithm::FBucketed, true),
        Algorithm::Match => unreachable!(),
    };
    let best = if args.copies > 1 {
        amplify_to_whp(solver, &inst, eps, args.copies, args.seed, Execution::Parallel)?.1
    } else {
        0
    };
    let (cover, counters) = solver.run(&inst, eps, &mut trial_rng(args.seed, best))?;
    let rounds = if mpc {
        let (same, report) =
            simulate_mpc_f_approx(&inst, eps, &mut trial_rng(args.seed, best), &PlannerConstants::default())?;
        debug_assert_eq!(same, cover);
        Some(report.simulated_rounds)
    } else {
        None
    };
    let valid = verify_cover(&inst, &cover).is_valid();
    Ok(row(args, eps, best, cover.size(), valid, counters, rounds))
}

fn solve_matching(args: &SolveArgs, text: &str) -> anyhow::Result<SolveRow> {
    let hg = read_hypergraph(text)?;
    let eps = match (args.eps, args.target_eps) {
        (_, Some(target)) => {
            validate_eps(target)?;
            target / hg.rank().max(1) as f64
        }
        (Some(eps), None) => eps,
        (None, None) => DEFAULT_EPS,
    };
    validate_eps(eps)?;
    let best = if args.copies > 1 { amplify_matching(&hg, eps, args.copies, args.seed, Execution::Parallel)?.1 } else { 0 };
    let (m, counters) = MatchingSampler::new(&hg, eps)?.run(&mut trial_rng(args.seed, best));
    let valid = verify_matching(&hg, &m).is_valid();
    Ok(row(args, eps, best, m.size(), valid, counters, None))
}

/// Accepts a hypergraph, or a set cover instance read as its element hypergraph.
fn read_hypergraph(text: &str) -> anyhow::Result<Hypergraph> {
    let is_sc = text.lines().map(str::trim).find(|l| l.starts_with('p')).is_some_and(|l| {
        l.split_whitespace().nth(1) == Some("sc")
    });
    Ok(if is_sc { to_hypergraph(&parse_instance(text)?) } else { parse_hypergraph(text)? })
}

fn row(
    args: &SolveArgs,
    eps: f64,
    best_copy: u64,
    size: usize,
    valid: bool,
    k: CostCounters,
    mpc_rounds: Option<usize>,
) -> SolveRow {
    SolveRow {
        algorithm: args.alg.name(),
        eps,
        seed: args.seed,
        copies: args.copies,
        best_copy,
        size,
        valid,
        element_touches: k.element_touches,
        set_touches: k.set_touches,
        edge_touches: k.edge_touches,
        steps_executed: k.steps_executed,
        rebucket_events: k.rebucket_events,
        mpc_rounds,
    }
}
