//! Logical simulation of the round-compressed MPC executions: phase planning,
//! per-phase neighborhood measurements, sparsification, sample-based degree
//! estimation, and best-of-many amplification.

mod degree;
mod planner;
mod simulate;

pub use degree::{element_sample_rate, simulate_degree_estimation, DegreeError, DegreeTrace, EstimatedBatch};
pub use planner::{plan_phases, plan_phases_hdelta, Phase, PhaseCase, PhasePlan, PlannerConstants};
pub use simulate::{simulate_mpc_f_approx, MpcReport, PhaseReport, DEGREE_DROP_CONSTANT};

use rand::Rng;

use crate::cover::{verify_cover, Cover, CoverAlgorithm};
use crate::instance::{Hypergraph, SetCoverInstance};
use crate::matching::{Matching, MatchingSampler};
use crate::schedule::ScheduleError;
use crate::trials::{map_trials, Execution};

/// Keeps every edge independently with probability `p`. Returns the kept
/// edges over the same vertex set and the number of vertices they touch.
pub fn sparsify_hypergraph<R: Rng + ?Sized>(hg: &Hypergraph, p: f64, rng: &mut R) -> (Hypergraph, usize) {
    let kept: Vec<Vec<usize>> = hg.edges().iter().filter(|_| rng.random::<f64>() < p).cloned().collect();
    let mut touched = vec![false; hg.num_vertices()];
    for e in &kept {
        for &v in e {
            touched[v] = true;
        }
    }
    let count = touched.iter().filter(|&&x| x).count();
    (Hypergraph::new(hg.num_vertices(), kept).expect("subset of a valid hypergraph"), count)
}

/// Runs `copies` independent solver instances (trial streams `0..copies` of
/// `seed`) and returns the smallest valid cover with its copy index.
pub fn amplify_to_whp(
    algorithm: CoverAlgorithm,
    instance: &SetCoverInstance,
    eps: f64,
    copies: u64,
    seed: u64,
    exec: Execution,
) -> Result<(Cover, u64), ScheduleError> {
    assert!(copies >= 1, "at least one copy");
    crate::schedule::validate_eps(eps)?;
    let covers = map_trials(seed, copies, exec, |_, rng| algorithm.run(instance, eps, rng).expect("eps validated").0);
    Ok(covers
        .into_iter()
        .zip(0..)
        .filter(|(c, _)| verify_cover(instance, c).is_valid())
        .min_by_key(|(c, i)| (c.size(), *i))
        .expect("every solver run returns a valid cover"))
}

/// Matching counterpart of [`amplify_to_whp`]: the largest matching wins.
pub fn amplify_matching(
    hg: &Hypergraph,
    eps: f64,
    copies: u64,
    seed: u64,
    exec: Execution,
) -> Result<(Matching, u64), ScheduleError> {
    assert!(copies >= 1, "at least one copy");
    let sampler = MatchingSampler::new(hg, eps)?;
    let runs = map_trials(seed, copies, exec, |_, rng| sampler.run(rng).0);
    Ok(runs
        .into_iter()
        .zip(0..)
        .max_by_key(|(m, i)| (m.size(), std::cmp::Reverse(*i)))
        .expect("copies >= 1"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_random_hypergraph, generate_random_instance};
    use crate::trials::trial_rng;

    #[test]
    fn sparsify_extremes() {
        let hg = generate_random_hypergraph(30, 60, 3, 1).unwrap();
        let (h, c) = sparsify_hypergraph(&hg, 0.0, &mut trial_rng(0, 0));
        assert_eq!((h.num_edges(), c), (0, 0));
        let (h, _) = sparsify_hypergraph(&hg, 1.0, &mut trial_rng(0, 0));
        assert_eq!(h.edges(), hg.edges());
    }

    #[test]
    fn single_copy_is_a_plain_run() {
        let inst = generate_random_instance(20, 60, 3, 3).unwrap();
        let (best, idx) = amplify_to_whp(CoverAlgorithm::FBucketed, &inst, 0.1, 1, 9, Execution::Parallel).unwrap();
        let (one, _) = CoverAlgorithm::FBucketed.run(&inst, 0.1, &mut trial_rng(9, 0)).unwrap();
        assert_eq!((best, idx), (one, 0));
    }

    #[test]
    fn best_of_is_at_most_mean() {
        let inst = generate_random_instance(20, 60, 3, 3).unwrap();
        let copies = 40;
        let (best, _) = amplify_to_whp(CoverAlgorithm::FOnline, &inst, 0.1, copies, 4, Execution::Parallel).unwrap();
        let sizes = map_trials(4, copies, Execution::Parallel, |_, rng| {
            CoverAlgorithm::FOnline.run(&inst, 0.1, rng).unwrap().0.size() as f64
        });
        assert!(best.size() as f64 <= sizes.iter().sum::<f64>() / copies as f64);
        let hg = generate_random_hypergraph(20, 20, 2, 1).unwrap();
        let (m, _) = amplify_matching(&hg, 0.1, 10, 1, Execution::Parallel).unwrap();
        let first = MatchingSampler::new(&hg, 0.1).unwrap().run(&mut trial_rng(1, 0)).0;
        assert!(m.size() >= first.size());
    }
}
