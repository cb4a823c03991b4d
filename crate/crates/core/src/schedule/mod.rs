//! The sampling-probability schedule shared by every solver.
//!
//! Steps are indexed downwards from `k` to `0`. Step `i` samples with
//! probability `(1 + eps)^(-ceil(i / b))`, so the probability grows by a
//! `(1 + eps)` factor every `b` steps and reaches exactly one at step zero.

mod alias;

pub use alias::{AliasError, AliasTable};

use thiserror::Error;

/// Values within this distance of an integer are snapped to it before a
/// ceiling or floor is taken, so that `k` does not depend on the last ulp of
/// a logarithm.
pub const INTEGER_GUARD: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("InvalidEpsilon: eps must lie in (0, 1/2], got {0}")]
    InvalidEpsilon(f64),
    #[error("step index {index} out of range 0..={k}")]
    IndexOutOfRange { index: usize, k: usize },
    #[error("schedule length requested for a zero-sized quantity")]
    ZeroSize,
}

pub fn validate_eps(eps: f64) -> Result<(), ScheduleError> {
    if eps.is_finite() && eps > 0.0 && eps <= 0.5 {
        Ok(())
    } else {
        Err(ScheduleError::InvalidEpsilon(eps))
    }
}

/// Ceiling that snaps values lying within [`INTEGER_GUARD`] of an integer.
pub fn guarded_ceil(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < INTEGER_GUARD {
        r
    } else {
        x.ceil()
    }
}

/// Floor that snaps values lying within [`INTEGER_GUARD`] of an integer.
pub fn guarded_floor(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < INTEGER_GUARD {
        r
    } else {
        x.floor()
    }
}

/// `log_{1+eps}(x)`.
pub fn log_base(x: f64, eps: f64) -> f64 {
    x.ln() / eps.ln_1p()
}

/// `ceil(ln(2 + 2 eps) / eps)`.
pub fn compute_b(eps: f64) -> Result<usize, ScheduleError> {
    validate_eps(eps)?;
    Ok(guarded_ceil((2.0 + 2.0 * eps).ln() / eps) as usize)
}

fn schedule_length(size: usize, eps: f64) -> Result<usize, ScheduleError> {
    let b = compute_b(eps)?;
    if size == 0 {
        return Err(ScheduleError::ZeroSize);
    }
    let blocks = guarded_ceil(log_base(size as f64 / eps, eps)).max(0.0) as usize;
    Ok(b * blocks)
}

/// Step count for the element-sampling loops: `b * ceil(log_{1+eps}(delta / eps))`.
pub fn schedule_length_outer(delta: usize, eps: f64) -> Result<usize, ScheduleError> {
    schedule_length(delta, eps)
}

/// Step count for the set-sampling inner loop: `b * ceil(log_{1+eps}(freq / eps))`.
pub fn schedule_length_inner(freq: usize, eps: f64) -> Result<usize, ScheduleError> {
    schedule_length(freq, eps)
}

/// An immutable probability schedule over steps `k..=0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    eps: f64,
    b: usize,
    k: usize,
    probs: Vec<f64>,
}

impl Schedule {
    pub fn new(eps: f64, k: usize) -> Result<Self, ScheduleError> {
        let b = compute_b(eps)?;
        let probs = (0..=k)
            .map(|i| (1.0 + eps).powi(-(i.div_ceil(b) as i32)))
            .collect();
        Ok(Schedule { eps, b, k, probs })
    }

    /// Schedule for a loop that samples elements of sets of size at most `delta`.
    pub fn outer(delta: usize, eps: f64) -> Result<Self, ScheduleError> {
        Self::new(eps, schedule_length_outer(delta, eps)?)
    }

    /// Schedule for a loop that samples sets, with element frequency at most `freq`.
    pub fn inner(freq: usize, eps: f64) -> Result<Self, ScheduleError> {
        Self::new(eps, schedule_length_inner(freq, eps)?)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn probability(&self, i: usize) -> Result<f64, ScheduleError> {
        self.probs
            .get(i)
            .copied()
            .ok_or(ScheduleError::IndexOutOfRange { index: i, k: self.k })
    }

    /// Unchecked variant of [`Schedule::probability`] for hot loops.
    #[inline]
    pub fn p(&self, i: usize) -> f64 {
        self.probs[i]
    }

    /// `p_0 ..= p_k`.
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Probability that an item is first sampled at step `i`:
    /// `p_i * prod_{j > i} (1 - p_j)`. Index `i` of the result is step `i`.
    pub fn bucket_distribution(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.k + 1];
        let mut survive = 1.0;
        for i in (0..=self.k).rev() {
            out[i] = self.probs[i] * survive;
            survive *= 1.0 - self.probs[i];
        }
        out
    }

    /// Alias table over [`Schedule::bucket_distribution`].
    pub fn bucket_sampler(&self) -> AliasTable {
        AliasTable::new(&self.bucket_distribution())
            .expect("bucket distribution always has p_0 = 1 mass")
    }
}
