use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Cover, CostCounters};
use crate::instance::SetCoverInstance;
use crate::schedule::{guarded_floor, log_base, Schedule, ScheduleError};

/// Read-only view of the solver state a size oracle may inspect.
pub struct ResidualView<'a> {
    residual: &'a [usize],
    covered: &'a [bool],
}

impl ResidualView<'_> {
    /// Number of uncovered elements in set `s`.
    pub fn residual(&self, s: usize) -> usize {
        self.residual[s]
    }

    pub fn is_covered(&self, t: usize) -> bool {
        self.covered[t]
    }
}

/// Over-approximates residual set sizes: `r <= estimate <= (1 + delta) r`.
pub trait SizeOracle {
    fn estimate(&mut self, set: usize, view: &ResidualView<'_>) -> f64;
    fn delta(&self) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Exact;

impl SizeOracle for Exact {
    fn estimate(&mut self, set: usize, view: &ResidualView<'_>) -> f64 {
        view.residual(set) as f64
    }

    fn delta(&self) -> f64 {
        0.0
    }
}

/// Exact size times a fresh uniform factor in `[1, 1 + delta]`.
#[derive(Debug, Clone)]
pub struct NoisyExact {
    delta: f64,
    rng: ChaCha8Rng,
}

impl NoisyExact {
    pub fn new(delta: f64, seed: u64) -> Self {
        assert!(delta >= 0.0 && delta.is_finite(), "delta must be finite and nonnegative");
        NoisyExact { delta, rng: ChaCha8Rng::seed_from_u64(seed) }
    }
}

impl SizeOracle for NoisyExact {
    fn estimate(&mut self, set: usize, view: &ResidualView<'_>) -> f64 {
        let factor = 1.0 + self.delta * self.rng.random::<f64>();
        view.residual(set) as f64 * factor
    }

    fn delta(&self) -> f64 {
        self.delta
    }
}

/// One committed batch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatchRecord {
    pub round: usize,
    pub step: usize,
    pub sets: usize,
    /// Smallest true residual size among the batch's sets.
    pub min_batch_residual: usize,
    /// Largest true residual size over all live sets, batch included.
    pub max_live_residual: usize,
    /// Elements this batch covers for the first time.
    pub newly_covered: usize,
    /// Sum over those elements of how many batch sets contain them.
    pub multiplicity_sum: usize,
}

impl BatchRecord {
    pub fn size_ratio(&self) -> f64 {
        self.max_live_residual as f64 / self.min_batch_residual as f64
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct HdeltaTrace {
    pub batches: Vec<BatchRecord>,
}

/// `floor(log_{1+eps} d)` with the integer guard, or `None` below 1.
fn level(d: f64, eps: f64) -> Option<usize> {
    if d < 1.0 {
        None
    } else {
        Some(guarded_floor(log_base(d, eps)).max(0.0) as usize)
    }
}

/// Size-threshold solver. Round `j` considers sets of estimated size at least
/// `(1+eps)^j`; each such set draws the step it is sampled at up front, is
/// examined exactly once in that step, and is either added or moved to a lower
/// round at the end of the round.
pub fn hdelta_cover<R: Rng + ?Sized, O: SizeOracle + ?Sized>(
    instance: &SetCoverInstance,
    eps: f64,
    rng: &mut R,
    oracle: &mut O,
) -> Result<(Cover, CostCounters), ScheduleError> {
    run(instance, eps, rng, oracle, None)
}

/// [`hdelta_cover`] that also records every committed batch.
pub fn hdelta_cover_traced<R: Rng + ?Sized, O: SizeOracle + ?Sized>(
    instance: &SetCoverInstance,
    eps: f64,
    rng: &mut R,
    oracle: &mut O,
) -> Result<(Cover, CostCounters, HdeltaTrace), ScheduleError> {
    let mut trace = HdeltaTrace::default();
    let (c, k) = run(instance, eps, rng, oracle, Some(&mut trace))?;
    Ok((c, k, trace))
}

fn run<R: Rng + ?Sized, O: SizeOracle + ?Sized>(
    instance: &SetCoverInstance,
    eps: f64,
    rng: &mut R,
    oracle: &mut O,
    mut trace: Option<&mut HdeltaTrace>,
) -> Result<(Cover, CostCounters), ScheduleError> {
    crate::schedule::validate_eps(eps)?;
    let mut counters = CostCounters::default();
    if instance.delta() == 0 {
        return Ok((Cover::default(), counters));
    }
    let num_sets = instance.num_sets();
    let schedule = Schedule::inner(instance.freq(), eps)?;
    let table = schedule.bucket_sampler();
    let k = schedule.k();
    let top = level(instance.delta() as f64, eps).expect("delta >= 1");

    let mut residual: Vec<usize> = instance.sets().iter().map(Vec::len).collect();
    let mut covered = vec![false; instance.num_elements()];
    let mut chosen_flag = vec![false; num_sets];
    let mut packed: Vec<Vec<usize>> = instance.sets().to_vec();
    let mut chosen = Vec::new();

    let mut rounds: Vec<Vec<usize>> = vec![Vec::new(); top + 1];
    for s in 0..num_sets {
        counters.set_touches += 1;
        let view = ResidualView { residual: &residual, covered: &covered };
        if let Some(l) = level(oracle.estimate(s, &view), eps) {
            rounds[l.min(top)].push(s);
        }
    }

    let mut steps: Vec<Vec<usize>> = vec![Vec::new(); k + 1];
    let mut batch = Vec::new();
    let mut demoted = Vec::new();
    let mut hits = vec![0usize; if trace.is_some() { instance.num_elements() } else { 0 }];

    for j in (0..=top).rev() {
        let members = std::mem::take(&mut rounds[j]);
        for &s in &members {
            if chosen_flag[s] || residual[s] == 0 {
                continue;
            }
            counters.set_touches += packed[s].len() as u64;
            packed[s].retain(|&t| !covered[t]);
            steps[table.sample(rng)].push(s);
        }
        demoted.clear();

        for i in (0..=k).rev() {
            counters.steps_executed += 1;
            batch.clear();
            for &s in &steps[i] {
                counters.set_touches += 1;
                let view = ResidualView { residual: &residual, covered: &covered };
                let d = oracle.estimate(s, &view);
                if level(d, eps).is_some_and(|l| l >= j) {
                    batch.push(s);
                } else {
                    demoted.push(s);
                }
            }
            steps[i].clear();
            if batch.is_empty() {
                continue;
            }

            if let Some(tr) = trace.as_deref_mut() {
                let min_batch_residual = batch.iter().map(|&s| residual[s]).min().unwrap_or(0);
                let max_live_residual = (0..num_sets).filter(|&s| !chosen_flag[s]).map(|s| residual[s]).max().unwrap_or(0);
                let mut newly = 0;
                let mut mult = 0;
                for &s in &batch {
                    for &t in &packed[s] {
                        if !covered[t] {
                            if hits[t] == 0 {
                                newly += 1;
                            }
                            hits[t] += 1;
                            mult += 1;
                        }
                    }
                }
                for &s in &batch {
                    for &t in &packed[s] {
                        hits[t] = 0;
                    }
                }
                tr.batches.push(BatchRecord {
                    round: j,
                    step: i,
                    sets: batch.len(),
                    min_batch_residual,
                    max_live_residual,
                    newly_covered: newly,
                    multiplicity_sum: mult,
                });
            }

            for &s in &batch {
                chosen_flag[s] = true;
                chosen.push(s);
            }
            for &s in &batch {
                for &t in &packed[s] {
                    counters.set_touches += 1;
                    if covered[t] {
                        continue;
                    }
                    covered[t] = true;
                    for &s2 in instance.element(t) {
                        counters.edge_touches += 1;
                        residual[s2] -= 1;
                    }
                }
            }
        }

        for &s in &demoted {
            counters.rebucket_events += 1;
            let view = ResidualView { residual: &residual, covered: &covered };
            if let Some(l) = level(oracle.estimate(s, &view), eps) {
                if j > 0 {
                    rounds[l.min(j - 1)].push(s);
                }
            }
        }
    }

    Ok((Cover { chosen_sets: chosen }, counters))
}
