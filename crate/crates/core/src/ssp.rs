//! The Set Sampling Process: a set shrinks under an adversary while each
//! survivor is sampled with the schedule's slowly growing probability.
//!
//! Element ids are `0..initial_size`; id 0 is the designated element `a`.
//! When `protect_marked` is set it stays at position 0 of the live list and
//! adversaries must not remove it.
//!
//! The first nonempty step is found by inverse transform on the cumulative
//! hazard `sum_i -n_i ln(1 - p_i)`: one Exp(1) draw per run instead of one
//! uniform per step. Steps after `z` are not simulated.

use std::fmt::Debug;
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Binomial, Distribution, Exp1};
use thiserror::Error;

use crate::schedule::{compute_b, guarded_ceil, log_base, Schedule, ScheduleError};
use crate::stats::{proportion, Estimate, RunningStats};
use crate::trials::{fold_trials, trial_rng, Execution, TrialRng};

/// Fewest trials an estimator accepts.
pub const MIN_TRIALS: u64 = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SspError {
    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),
    #[error("InsufficientTrials: need at least {min}, got {got}")]
    InsufficientTrials { min: u64, got: u64 },
    #[error("InsufficientSamples: no trial had the marked element in R_z")]
    InsufficientSamples,
    #[error("check {check} fails at step {step}: {lhs} > {rhs}")]
    StepCheck { check: char, step: usize, lhs: f64, rhs: f64 },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// One sampled step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    pub step: usize,
    pub live: usize,
    pub sampled: usize,
}

/// What an adversary may look at before choosing `A_i`.
pub struct AdversaryView<'a> {
    /// The step `i` about to be sampled.
    pub step: usize,
    pub schedule: &'a Schedule,
    pub initial_size: usize,
    /// Records for steps `k..=i+1`, oldest first.
    pub history: &'a [StepRecord],
    /// Positions `0..protected` of the live list must be kept.
    pub protected: usize,
}

/// Shrinks `A_{i+1}` (the live list) to `A_i` in place. Only removals are
/// allowed and the first `view.protected` entries must stay put.
pub trait Adversary: Send + Sync + Debug {
    fn shrink(&self, view: &AdversaryView<'_>, live: &mut Vec<u32>, rng: &mut TrialRng);
}

/// Never deletes.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Adversary for Identity {
    fn shrink(&self, _: &AdversaryView<'_>, _: &mut Vec<u32>, _: &mut TrialRng) {}
}

/// Drops the back half of the removable elements every step.
#[derive(Debug, Clone, Copy, Default)]
pub struct HalveEachStep;

impl Adversary for HalveEachStep {
    fn shrink(&self, view: &AdversaryView<'_>, live: &mut Vec<u32>, _: &mut TrialRng) {
        let start = view.protected.min(live.len());
        live.truncate(start + (live.len() - start) / 2);
    }
}

/// Each removable element disappears with probability `rate * p_i`, as if a
/// set sampled through some other element had covered it.
#[derive(Debug, Clone, Copy)]
pub struct DeleteSampledNeighbors {
    pub rate: f64,
}

impl Adversary for DeleteSampledNeighbors {
    fn shrink(&self, view: &AdversaryView<'_>, live: &mut Vec<u32>, rng: &mut TrialRng) {
        let start = view.protected.min(live.len());
        let removable = live.len() - start;
        let q = (self.rate * view.schedule.p(view.step)).clamp(0.0, 1.0);
        if removable == 0 || q == 0.0 {
            return;
        }
        let count = Binomial::new(removable as u64, q).expect("q in [0, 1]").sample(rng) as usize;
        if count == 0 {
            return;
        }
        let mut picks = rand::seq::index::sample(rng, removable, count).into_vec();
        picks.sort_unstable_by(|a, b| b.cmp(a));
        for pos in picks {
            live.swap_remove(start + pos);
        }
    }
}

/// Watches the expected sample size `p_i * |A_{i+1}|`, i.e. how close the
/// next step is to sampling something. Once it reaches `threshold` the
/// adversary halves the removable elements each step.
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveKillOnNearMiss {
    pub threshold: f64,
}

impl Adversary for AdaptiveKillOnNearMiss {
    fn shrink(&self, view: &AdversaryView<'_>, live: &mut Vec<u32>, _: &mut TrialRng) {
        let start = view.protected.min(live.len());
        if view.schedule.p(view.step) * live.len() as f64 >= self.threshold {
            live.truncate(start + (live.len() - start) / 2);
        }
    }
}

/// Removes everything removable at one chosen step.
#[derive(Debug, Clone, Copy)]
pub struct DeleteAllAt {
    pub step: usize,
}

impl Adversary for DeleteAllAt {
    fn shrink(&self, view: &AdversaryView<'_>, live: &mut Vec<u32>, _: &mut TrialRng) {
        if view.step == self.step {
            live.truncate(view.protected.min(live.len()));
        }
    }
}

/// The four adversaries every lemma grid runs against.
pub fn builtin_adversaries(eps: f64) -> Vec<(&'static str, Arc<dyn Adversary>)> {
    vec![
        ("identity", Arc::new(Identity)),
        ("halve", Arc::new(HalveEachStep)),
        ("delete-sampled-neighbors", Arc::new(DeleteSampledNeighbors { rate: 0.5 })),
        ("adaptive-kill", Arc::new(AdaptiveKillOnNearMiss { threshold: eps })),
    ]
}

#[derive(Debug, Clone)]
pub struct SspConfig {
    pub initial_size: usize,
    pub eps: f64,
    pub k: usize,
    pub adversary: Arc<dyn Adversary>,
    pub seed: u64,
    pub protect_marked: bool,
}

/// `b * ceil(log_{1+eps}(n / eps))`, the fewest steps a process over `n`
/// elements may run.
pub fn minimum_k(initial_size: usize, eps: f64) -> Result<usize, ScheduleError> {
    let b = compute_b(eps)?;
    if initial_size == 0 {
        return Err(ScheduleError::ZeroSize);
    }
    Ok(b * guarded_ceil(log_base(initial_size as f64 / eps, eps)).max(0.0) as usize)
}

impl SspConfig {
    /// Configuration with the minimum admissible `k`.
    pub fn new(initial_size: usize, eps: f64, adversary: Arc<dyn Adversary>, seed: u64) -> Result<Self, SspError> {
        let k = minimum_k(initial_size, eps).map_err(|e| SspError::InvalidConfig(e.to_string()))?;
        Ok(SspConfig { initial_size, eps, k, adversary, seed, protect_marked: false })
    }

    pub fn with_k(mut self, k: usize) -> Self {
        self.k = k;
        self
    }

    pub fn protected(mut self, protect: bool) -> Self {
        self.protect_marked = protect;
        self
    }

    pub fn validate(&self) -> Result<(), SspError> {
        let min = minimum_k(self.initial_size, self.eps).map_err(|e| SspError::InvalidConfig(e.to_string()))?;
        if self.k < min {
            return Err(SspError::InvalidConfig(format!("k = {} is below the minimum {min}", self.k)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SspTrace {
    /// Steps `k` down to `z` (or `0` when nothing was sampled).
    pub records: Vec<StepRecord>,
    /// Stop index, `-1` if every sample was empty.
    pub z: i64,
    pub r_z: usize,
    pub contains_marked: bool,
}

/// Outcome of one run without the per-step records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SspOutcome {
    pub z: i64,
    pub r_z: usize,
    pub contains_marked: bool,
}

/// Precomputed schedule data plus reusable buffers for repeated runs.
pub struct SspRunner<'a> {
    config: &'a SspConfig,
    schedule: Schedule,
    ln_miss: Vec<f64>,
    live: Vec<u32>,
    history: Vec<StepRecord>,
}

impl<'a> SspRunner<'a> {
    pub fn new(config: &'a SspConfig) -> Result<Self, SspError> {
        config.validate()?;
        let schedule = Schedule::new(config.eps, config.k)?;
        let ln_miss = schedule.probabilities().iter().map(|p| (-p).ln_1p()).collect();
        Ok(SspRunner {
            config,
            schedule,
            ln_miss,
            live: Vec::with_capacity(config.initial_size),
            history: Vec::with_capacity(config.k + 1),
        })
    }

    pub fn schedule(&self) -> &Schedule {
        &self.schedule
    }

    /// Runs one process; afterwards [`SspRunner::history`] holds its records.
    pub fn run(&mut self, rng: &mut TrialRng) -> SspOutcome {
        let cfg = self.config;
        self.live.clear();
        self.live.extend(0..cfg.initial_size as u32);
        self.history.clear();
        let protected = usize::from(cfg.protect_marked);

        let budget: f64 = Exp1.sample(rng);
        let mut hazard = 0.0;
        for i in (0..=cfg.k).rev() {
            if i < cfg.k {
                let view = AdversaryView {
                    step: i,
                    schedule: &self.schedule,
                    initial_size: cfg.initial_size,
                    history: &self.history,
                    protected: protected.min(self.live.len()),
                };
                cfg.adversary.shrink(&view, &mut self.live, rng);
                debug_assert!(!cfg.protect_marked || self.live.first() == Some(&0));
            }
            let n = self.live.len();
            if n > 0 {
                hazard -= n as f64 * self.ln_miss[i];
            }
            if n == 0 || hazard < budget {
                self.history.push(StepRecord { step: i, live: n, sampled: 0 });
                continue;
            }
            let (first, r) = sample_nonempty(n, self.schedule.p(i), self.ln_miss[i], rng);
            self.history.push(StepRecord { step: i, live: n, sampled: r });
            return SspOutcome { z: i as i64, r_z: r, contains_marked: first == 0 && self.live[0] == 0 };
        }
        SspOutcome { z: -1, r_z: 0, contains_marked: false }
    }

    pub fn history(&self) -> &[StepRecord] {
        &self.history
    }
}

/// Draws a Bernoulli(p) sample of `n` positions conditioned on being nonempty.
/// Returns the first included position and the sample size.
fn sample_nonempty(n: usize, p: f64, ln_miss: f64, rng: &mut TrialRng) -> (usize, usize) {
    if p >= 1.0 {
        return (0, n);
    }
    // P(first = j) is proportional to (1-p)^j p on 0..n.
    let hit = -(n as f64 * ln_miss).exp_m1();
    let u: f64 = rng.random();
    let first = (((-u * hit).ln_1p() / ln_miss).floor() as usize).min(n - 1);
    let rest = n - 1 - first;
    let extra = if rest == 0 { 0 } else { Binomial::new(rest as u64, p).expect("p in [0, 1)").sample(rng) };
    (first, 1 + extra as usize)
}

/// Runs one process on stream 0 of the configured seed.
pub fn run_ssp(config: &SspConfig) -> Result<SspTrace, SspError> {
    let mut runner = SspRunner::new(config)?;
    let out = runner.run(&mut trial_rng(config.seed, 0));
    Ok(SspTrace { records: runner.history().to_vec(), z: out.z, r_z: out.r_z, contains_marked: out.contains_marked })
}

fn check_trials(trials: u64) -> Result<(), SspError> {
    if trials < MIN_TRIALS {
        Err(SspError::InsufficientTrials { min: MIN_TRIALS, got: trials })
    } else {
        Ok(())
    }
}

/// Mean of `|R_z|` over independent runs (`z = -1` counts as 0).
pub fn estimate_expected_rz(config: &SspConfig, trials: u64, exec: Execution) -> Result<Estimate, SspError> {
    check_trials(trials)?;
    config.validate()?;
    let stats = fold_trials(
        config.seed,
        trials,
        exec,
        || (RunningStats::new(), SspRunner::new(config).expect("validated")),
        |(stats, runner), _, rng| stats.push(runner.run(rng).r_z as f64),
        |mut a, b| {
            a.0.merge(&b.0);
            a
        },
    )
    .0;
    Ok(stats.estimate())
}

/// Rejection estimate of `P(|R_z| > 1 | a in R_z)`. The marked element is
/// always protected.
pub fn estimate_conditional_multiplicity(
    config: &SspConfig,
    trials: u64,
    exec: Execution,
) -> Result<Estimate, SspError> {
    check_trials(trials)?;
    let config = config.clone().protected(true);
    config.validate()?;
    let (accepted, multiple, _) = fold_trials(
        config.seed,
        trials,
        exec,
        || (0u64, 0u64, SspRunner::new(&config).expect("validated")),
        |(acc, mult, runner), _, rng| {
            let out = runner.run(rng);
            if out.contains_marked {
                *acc += 1;
                *mult += u64::from(out.r_z > 1);
            }
        },
        |a, b| (a.0 + b.0, a.1 + b.1, a.2),
    );
    if accepted == 0 {
        return Err(SspError::InsufficientSamples);
    }
    Ok(proportion(multiple, accepted))
}

/// Counts of inequalities verified by [`check_step_lemmas`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StepLemmaReport {
    pub low_initial: usize,
    pub slow_increase: usize,
    pub conditional_size: usize,
}

/// Deterministic step-level checks on a fixed size sequence.
/// `n_sequence[t]` is `|A_{k-t}|`, so index 0 is the first step sampled.
///
/// * (a) `p_j n_j <= eps` for `j` in `(k-b, k]`;
/// * (b) `p_i n_i <= (1+eps) p_{i+b} n_{i+b}`;
/// * (c) `E[|R_i| | R_i nonempty] = p_i n_i / (1-(1-p_i)^{n_i}) <= 1 + p_i n_i`.
pub fn check_step_lemmas(schedule: &Schedule, n_sequence: &[usize]) -> Result<StepLemmaReport, SspError> {
    let k = schedule.k();
    if n_sequence.len() != k + 1 {
        return Err(SspError::InvalidConfig(format!("expected {} sizes, got {}", k + 1, n_sequence.len())));
    }
    if n_sequence.windows(2).any(|w| w[1] > w[0]) {
        return Err(SspError::InvalidConfig("sizes must not grow as steps decrease".into()));
    }
    let n = |i: usize| n_sequence[k - i] as f64;
    let (eps, b) = (schedule.eps(), schedule.b());
    let tol = 1e-12;
    let mut report = StepLemmaReport::default();

    for j in (k + 1).saturating_sub(b)..=k {
        let lhs = schedule.p(j) * n(j);
        if lhs > eps * (1.0 + tol) {
            return Err(SspError::StepCheck { check: 'a', step: j, lhs, rhs: eps });
        }
        report.low_initial += 1;
    }
    for i in 0..=k.saturating_sub(b) {
        if i + b > k {
            break;
        }
        let lhs = schedule.p(i) * n(i);
        let rhs = (1.0 + eps) * schedule.p(i + b) * n(i + b);
        if lhs > rhs * (1.0 + tol) {
            return Err(SspError::StepCheck { check: 'b', step: i, lhs, rhs });
        }
        report.slow_increase += 1;
    }
    for i in 0..=k {
        if n(i) == 0.0 {
            continue;
        }
        let p = schedule.p(i);
        let mean = p * n(i);
        let lhs = mean / -(n(i) * (-p).ln_1p()).exp_m1();
        if lhs > (1.0 + mean) * (1.0 + tol) {
            return Err(SspError::StepCheck { check: 'c', step: i, lhs, rhs: 1.0 + mean });
        }
        report.conditional_size += 1;
    }
    Ok(report)
}
