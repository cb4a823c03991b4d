use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::cover::Cover;
use crate::instance::SetCoverInstance;
use crate::schedule::{guarded_floor, log_base, Schedule, ScheduleError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DegreeError {
    #[error("round j = {j} outside 0..={max}")]
    RoundOutOfRange { j: usize, max: usize },
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatedBatch {
    pub step: usize,
    /// True residual sizes of the chosen sets just before they were added.
    pub residual_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeTrace {
    pub j: usize,
    pub q: f64,
    pub threshold: f64,
    pub batches: Vec<EstimatedBatch>,
    /// `estimates[t][s]` is the running estimate of set `s` after the `t`-th
    /// step (`t = 0` is step `k`).
    pub estimates: Vec<Vec<f64>>,
    pub cover: Cover,
}

/// `min(100 ln n / (eps^2 (1+eps)^j), 1)`.
pub fn element_sample_rate(eps: f64, j: usize, n: usize) -> f64 {
    let ln_n = (n.max(2) as f64).ln();
    (100.0 / (eps * eps) * ln_n / (1.0 + eps).powi(j as i32)).min(1.0)
}

/// One round `j` of the size-threshold inner loop with sizes estimated from
/// independent element samples `X_k, ..., X_0` of rate `q_j`. A set's estimate
/// is the running minimum of `|N(s) ∩ X_i| / q_j`; sets whose estimate is at
/// least `(1+eps)^j` are sampled with probability `p_i`.
pub fn simulate_degree_estimation<R: Rng + ?Sized>(
    instance: &SetCoverInstance,
    eps: f64,
    j: usize,
    rng: &mut R,
) -> Result<DegreeTrace, DegreeError> {
    crate::schedule::validate_eps(eps)?;
    let max_j = if instance.delta() == 0 { 0 } else { guarded_floor(log_base(instance.delta() as f64, eps)) as usize };
    if j > max_j {
        return Err(DegreeError::RoundOutOfRange { j, max: max_j });
    }
    let q = element_sample_rate(eps, j, instance.num_vertices());
    let threshold = (1.0 + eps).powi(j as i32);
    let mut trace = DegreeTrace { j, q, threshold, batches: Vec::new(), estimates: Vec::new(), cover: Cover::default() };
    if instance.delta() == 0 {
        return Ok(trace);
    }
    let schedule = Schedule::inner(instance.freq(), eps)?;
    let k = schedule.k();
    let ne = instance.num_elements();
    let samples: Vec<Vec<bool>> = (0..=k).map(|_| (0..ne).map(|_| rng.random::<f64>() < q).collect()).collect();

    let ns = instance.num_sets();
    let mut estimate = vec![f64::INFINITY; ns];
    let mut removed = vec![false; ns];
    let mut covered = vec![false; ne];
    let mut batch = Vec::new();
    for i in (0..=k).rev() {
        let x = &samples[i];
        batch.clear();
        for s in (0..ns).filter(|&s| !removed[s]) {
            let hits = instance.set(s).iter().filter(|&&t| !covered[t] && x[t]).count();
            estimate[s] = estimate[s].min(hits as f64 / q);
            if estimate[s] >= threshold * (1.0 - 1e-9) && rng.random::<f64>() < schedule.p(i) {
                batch.push(s);
            }
        }
        trace.estimates.push(estimate.clone());
        if batch.is_empty() {
            continue;
        }
        let sizes = batch.iter().map(|&s| instance.set(s).iter().filter(|&&t| !covered[t]).count()).collect();
        trace.batches.push(EstimatedBatch { step: i, residual_sizes: sizes });
        for &s in &batch {
            removed[s] = true;
            trace.cover.chosen_sets.push(s);
            for &t in instance.set(s) {
                covered[t] = true;
            }
        }
    }
    Ok(trace)
}
