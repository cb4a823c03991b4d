//! Set-cover solvers: the online and bucketed `f`-approximations and the
//! size-threshold `H_Delta` algorithm.

mod f_approx;
mod hdelta;

pub use f_approx::{f_approx_bucketed, f_approx_online, BucketedRun};
pub use hdelta::{
    hdelta_cover, hdelta_cover_traced, BatchRecord, Exact, HdeltaTrace, NoisyExact, ResidualView, SizeOracle,
};

use rand::Rng;
use serde::Serialize;

use crate::instance::SetCoverInstance;
use crate::schedule::ScheduleError;

/// Chosen sets in the order they were added.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Cover {
    pub chosen_sets: Vec<usize>,
}

impl Cover {
    pub fn size(&self) -> usize {
        self.chosen_sets.len()
    }
}

/// Sequential work counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CostCounters {
    pub element_touches: u64,
    pub set_touches: u64,
    pub edge_touches: u64,
    pub steps_executed: u64,
    pub rebucket_events: u64,
}

/// Result of [`verify_cover`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoverCheck {
    Valid,
    Uncovered(usize),
    /// A set id is out of range or listed twice.
    BadSet(usize),
}

impl CoverCheck {
    pub fn is_valid(self) -> bool {
        self == CoverCheck::Valid
    }
}

/// Checks that the chosen sets are distinct and cover every element; on
/// failure reports the smallest uncovered element.
pub fn verify_cover(instance: &SetCoverInstance, cover: &Cover) -> CoverCheck {
    let mut seen = vec![false; instance.num_sets()];
    let mut covered = vec![false; instance.num_elements()];
    for &s in &cover.chosen_sets {
        if s >= seen.len() || seen[s] {
            return CoverCheck::BadSet(s);
        }
        seen[s] = true;
        for &t in instance.set(s) {
            covered[t] = true;
        }
    }
    match covered.iter().position(|c| !c) {
        Some(t) => CoverCheck::Uncovered(t),
        None => CoverCheck::Valid,
    }
}

/// Schedule parameter for a requested guarantee: `eps / 4` when calibrated,
/// so the `(1 + 4 eps')` factor becomes `(1 + eps)`.
pub fn effective_eps(eps: f64, calibrated: bool) -> f64 {
    if calibrated {
        eps / 4.0
    } else {
        eps
    }
}

/// Selects one of the randomized solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoverAlgorithm {
    FOnline,
    FBucketed,
    /// Exact sizes when `noise` is 0, otherwise [`NoisyExact`] with that delta.
    HDelta { noise: f64 },
}

impl CoverAlgorithm {
    pub fn run<R: Rng + ?Sized>(
        self,
        instance: &SetCoverInstance,
        eps: f64,
        rng: &mut R,
    ) -> Result<(Cover, CostCounters), ScheduleError> {
        match self {
            CoverAlgorithm::FOnline => f_approx_online(instance, eps, rng),
            CoverAlgorithm::FBucketed => f_approx_bucketed(instance, eps, rng),
            CoverAlgorithm::HDelta { noise: 0.0 } => hdelta_cover(instance, eps, rng, &mut Exact),
            CoverAlgorithm::HDelta { noise } => {
                let mut oracle = NoisyExact::new(noise, rng.random());
                hdelta_cover(instance, eps, rng, &mut oracle)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::parse_instance;

    #[test]
    fn verify_examples() {
        let i = parse_instance("p sc 3 3 4\ne 0 0\ne 0 1\ne 1 1\ne 2 2\n").unwrap();
        assert_eq!(verify_cover(&i, &Cover::default()), CoverCheck::Uncovered(0));
        assert!(verify_cover(&i, &Cover { chosen_sets: vec![0, 1, 2] }).is_valid());
        assert_eq!(verify_cover(&i, &Cover { chosen_sets: vec![0, 1] }), CoverCheck::Uncovered(2));
        assert_eq!(verify_cover(&i, &Cover { chosen_sets: vec![0, 0, 2] }), CoverCheck::BadSet(0));
        assert_eq!(verify_cover(&i, &Cover { chosen_sets: vec![7] }), CoverCheck::BadSet(7));
    }

    #[test]
    fn calibration() {
        assert_eq!(effective_eps(0.4, true), 0.1);
        assert_eq!(effective_eps(0.4, false), 0.4);
    }
}
