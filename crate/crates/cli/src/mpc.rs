use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use serde::Serialize;

use cover_sampler::cover::verify_cover;
use cover_sampler::instance::parse_instance;
use cover_sampler::mpc::{plan_phases, simulate_degree_estimation, simulate_mpc_f_approx, PlannerConstants};
use cover_sampler::schedule::{validate_eps, Schedule};
use cover_sampler::trials::trial_rng;

use crate::output::{emit, Format};
use crate::{read_input, Status};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MpcAlgorithm {
    /// Phase-compressed f-approximation.
    FApprox,
    /// One round of the size-threshold inner loop with sampled degree estimates.
    HdeltaInner,
}

#[derive(Debug, Args)]
pub struct MpcArgs {
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    /// Frequency used by `--delta-sweep`.
    #[arg(long, default_value_t = 2)]
    f: usize,
    /// Problem size used by `--delta-sweep`.
    #[arg(long, default_value_t = 1 << 20)]
    n: usize,
    /// Plan for `Delta = 2^a, 2^(a+step), ..., 2^b` without an instance.
    #[arg(long, value_name = "A:B:STEP", conflicts_with = "input")]
    delta_sweep: Option<String>,
    #[arg(long, value_enum, default_value_t = MpcAlgorithm::FApprox)]
    alg: MpcAlgorithm,
    /// Round index for `hdelta-inner`.
    #[arg(long)]
    j: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `c` in `tau = c ln n / p`.
    #[arg(long, default_value_t = 1.0)]
    tau_scale: f64,
    /// Multiplier of the first-case threshold exponent.
    #[arg(long, default_value_t = 1.0)]
    case1_exponent: f64,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
    input: Option<PathBuf>,
}

#[derive(Debug, Default, Serialize)]
struct PhaseRow {
    delta: usize,
    phase_index: Option<usize>,
    case: Option<u8>,
    r_j: usize,
    sampled_prob_start: Option<f64>,
    relevant_elements: Option<usize>,
    max_ball: Option<usize>,
    residual_degree_after: Option<usize>,
    cumulative_rounds: usize,
}

#[derive(Debug, Serialize)]
struct BatchRow {
    j: usize,
    q: f64,
    threshold: f64,
    step: usize,
    sets: usize,
    min_residual: usize,
    max_residual: usize,
}

pub fn run(args: &MpcArgs) -> anyhow::Result<Status> {
    validate_eps(args.eps)?;
    let constants = PlannerConstants { tau_scale: args.tau_scale, case1_exponent: args.case1_exponent };
    if let Some(range) = &args.delta_sweep {
        if args.alg != MpcAlgorithm::FApprox {
            bail!("--delta-sweep plans the f-approximation only");
        }
        return sweep(args, range, &constants);
    }
    let Some(path) = &args.input else { bail!("an instance file or --delta-sweep is required") };
    let inst = parse_instance(&read_input(path)?)?;
    let mut rng = trial_rng(args.seed, 0);
    match args.alg {
        MpcAlgorithm::HdeltaInner => {
            let j = args.j.context("--alg hdelta-inner needs --j")?;
            let tr = simulate_degree_estimation(&inst, args.eps, j, &mut rng)?;
            let rows: Vec<BatchRow> = tr
                .batches
                .iter()
                .map(|b| BatchRow {
                    j,
                    q: tr.q,
                    threshold: tr.threshold,
                    step: b.step,
                    sets: b.residual_sizes.len(),
                    min_residual: b.residual_sizes.iter().copied().min().unwrap_or(0),
                    max_residual: b.residual_sizes.iter().copied().max().unwrap_or(0),
                })
                .collect();
            emit(&rows, args.format)?;
            Ok(Status::Ok)
        }
        MpcAlgorithm::FApprox => {
            let (cover, report) = simulate_mpc_f_approx(&inst, args.eps, &mut rng, &constants)?;
            let mut rows: Vec<PhaseRow> = report
                .phases
                .iter()
                .map(|p| PhaseRow {
                    delta: inst.delta(),
                    phase_index: Some(p.phase_index),
                    case: Some(p.case as u8),
                    r_j: p.r,
                    sampled_prob_start: Some(p.sampled_prob_start),
                    relevant_elements: Some(p.relevant_elements),
                    max_ball: Some(p.max_ball),
                    residual_degree_after: Some(p.residual_degree_after),
                    cumulative_rounds: p.cumulative_rounds,
                })
                .collect();
            if rows.is_empty() {
                rows.push(PhaseRow { delta: inst.delta(), ..PhaseRow::default() });
            }
            emit(&rows, args.format)?;
            if verify_cover(&inst, &cover).is_valid() {
                Ok(Status::Ok)
            } else {
                eprintln!("verification failed");
                Ok(Status::VerificationFailed)
            }
        }
    }
}

fn sweep(args: &MpcArgs, range: &str, constants: &PlannerConstants) -> anyhow::Result<Status> {
    let parts: Vec<u32> = range
        .split(':')
        .map(|s| s.trim().parse::<u32>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("--delta-sweep {range:?}: expected A:B:STEP"))?;
    let [a, b, step] = parts[..] else { bail!("--delta-sweep {range:?}: expected A:B:STEP") };
    if step == 0 || a > b || b >= usize::BITS {
        bail!("--delta-sweep {range:?}: need 0 <= A <= B < {} and STEP >= 1", usize::BITS);
    }
    let mut rows = Vec::new();
    for x in (a..=b).step_by(step as usize) {
        let delta = 1usize << x;
        let plan = plan_phases(delta, args.f, args.eps, args.n, constants)?;
        let schedule = Schedule::new(args.eps, plan.k)?;
        let mut cumulative = 0;
        for (idx, p) in plan.phases.iter().enumerate() {
            cumulative += p.rounds();
            rows.push(PhaseRow {
                delta,
                phase_index: Some(idx),
                case: Some(p.case as u8),
                r_j: p.len,
                sampled_prob_start: Some(schedule.p(p.start)),
                cumulative_rounds: cumulative,
                ..PhaseRow::default()
            });
        }
    }
    emit(&rows, args.format)?;
    Ok(Status::Ok)
}
