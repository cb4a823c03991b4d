//! Exact baselines for small inputs, classic greedy, and the ratio harness.

use serde::Serialize;
use thiserror::Error;

use crate::cover::{Cover, CoverAlgorithm};
use crate::instance::{Hypergraph, SetCoverInstance};
use crate::matching::MatchingSampler;
use crate::schedule::ScheduleError;
use crate::stats::RunningStats;
use crate::trials::{fold_trials, Execution};

pub const MAX_EXACT_SETS: usize = 30;
pub const MAX_EXACT_EDGES: usize = 25;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("TooLarge: {got} exceeds the exact-solver limit {limit}")]
    TooLarge { limit: usize, got: usize },
    #[error("harmonic number of 0 is undefined")]
    ZeroHarmonic,
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

type Bits = Vec<u64>;

fn bits_of(items: &[usize], words: usize) -> Bits {
    let mut b = vec![0u64; words];
    for &x in items {
        b[x / 64] |= 1 << (x % 64);
    }
    b
}

fn count_and(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

fn count(a: &[u64]) -> u32 {
    a.iter().map(|x| x.count_ones()).sum()
}

/// Size of a minimum cover, by branch and bound on the uncovered element
/// contained in the fewest sets.
pub fn exact_min_cover(instance: &SetCoverInstance) -> Result<usize, OracleError> {
    if instance.num_sets() > MAX_EXACT_SETS {
        return Err(OracleError::TooLarge { limit: MAX_EXACT_SETS, got: instance.num_sets() });
    }
    if instance.is_empty() {
        return Ok(0);
    }
    let words = instance.num_elements().div_ceil(64);
    let sets: Vec<Bits> = instance.sets().iter().map(|s| bits_of(s, words)).collect();
    let mut uncovered = vec![0u64; words];
    for t in 0..instance.num_elements() {
        uncovered[t / 64] |= 1 << (t % 64);
    }
    let mut best = greedy_cover(instance).size();
    search(instance, &sets, &mut uncovered, 0, &mut best);
    Ok(best)
}

fn search(inst: &SetCoverInstance, sets: &[Bits], uncovered: &mut Bits, depth: usize, best: &mut usize) {
    let left = count(uncovered) as usize;
    if left == 0 {
        *best = (*best).min(depth);
        return;
    }
    let widest = sets.iter().map(|s| count_and(s, uncovered)).max().unwrap_or(0) as usize;
    if depth + left.div_ceil(widest) >= *best {
        return;
    }
    let mut pivot = usize::MAX;
    let mut fewest = usize::MAX;
    for (w, &word) in uncovered.iter().enumerate() {
        let mut rest = word;
        while rest != 0 {
            let t = w * 64 + rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let d = inst.element(t).len();
            if d < fewest {
                fewest = d;
                pivot = t;
            }
        }
    }
    let mut options: Vec<(u32, usize)> =
        inst.element(pivot).iter().map(|&s| (count_and(&sets[s], uncovered), s)).collect();
    options.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    for (_, s) in options {
        let saved = uncovered.clone();
        for (u, x) in uncovered.iter_mut().zip(&sets[s]) {
            *u &= !x;
        }
        search(inst, sets, uncovered, depth + 1, best);
        *uncovered = saved;
        if depth + 1 >= *best {
            return;
        }
    }
}

/// Size of a maximum matching, by include/exclude search over edges.
pub fn exact_max_matching(hg: &Hypergraph) -> Result<usize, OracleError> {
    if hg.num_edges() > MAX_EXACT_EDGES {
        return Err(OracleError::TooLarge { limit: MAX_EXACT_EDGES, got: hg.num_edges() });
    }
    let words = hg.num_vertices().div_ceil(64).max(1);
    let edges: Vec<Bits> = hg.edges().iter().map(|e| bits_of(e, words)).collect();
    let mut best = 0;
    let mut used = vec![0u64; words];
    grow(&edges, 0, &mut used, 0, &mut best);
    Ok(best)
}

fn grow(edges: &[Bits], next: usize, used: &mut Bits, size: usize, best: &mut usize) {
    *best = (*best).max(size);
    let open = edges[next..].iter().filter(|e| count_and(e, used) == 0).count();
    if size + open <= *best {
        return;
    }
    for e in next..edges.len() {
        if count_and(&edges[e], used) != 0 {
            continue;
        }
        for (u, x) in used.iter_mut().zip(&edges[e]) {
            *u |= x;
        }
        grow(edges, e + 1, used, size + 1, best);
        for (u, x) in used.iter_mut().zip(&edges[e]) {
            *u &= !x;
        }
    }
}

/// Repeatedly takes the set covering the most uncovered elements, lowest id
/// first on ties.
pub fn greedy_cover(instance: &SetCoverInstance) -> Cover {
    let mut residual: Vec<usize> = instance.sets().iter().map(Vec::len).collect();
    let mut covered = vec![false; instance.num_elements()];
    let mut left = instance.num_elements();
    let mut chosen = Vec::new();
    while left > 0 {
        let (s, _) = residual
            .iter()
            .enumerate()
            .fold((0, 0), |acc, (s, &r)| if r > acc.1 { (s, r) } else { acc });
        chosen.push(s);
        for &t in instance.set(s) {
            if !covered[t] {
                covered[t] = true;
                left -= 1;
                for &s2 in instance.element(t) {
                    residual[s2] -= 1;
                }
            }
        }
    }
    Cover { chosen_sets: chosen }
}

/// `H_d = 1 + 1/2 + ... + 1/d`.
pub fn harmonic(d: usize) -> Result<f64, OracleError> {
    if d == 0 {
        return Err(OracleError::ZeroHarmonic);
    }
    Ok((1..=d).rev().map(|i| 1.0 / i as f64).sum())
}

/// Expected-ratio bound of the `f`-approximation run at `eps`.
pub fn f_approx_bound(eps: f64, freq: usize) -> f64 {
    (1.0 + 4.0 * eps) * freq as f64
}

/// Expected-ratio bound of the size-threshold solver with size-estimate noise
/// `delta`.
pub fn hdelta_bound(eps: f64, max_set: usize, delta: f64) -> Result<f64, OracleError> {
    Ok((1.0 + eps) * (1.0 + 4.0 * eps) * (1.0 + delta) * harmonic(max_set)?)
}

/// Lower bound on the expected `|M| / OPT` of the matcher on rank-`h` inputs.
pub fn matching_bound(eps: f64, rank: usize) -> f64 {
    (1.0 - 6.0 * eps * rank as f64) / rank as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioReport {
    pub trials: u64,
    pub mean_ratio: f64,
    pub ci95: f64,
    pub opt: usize,
    pub bound: f64,
    /// `mean - ci95 <= bound` for covers, `mean + ci95 >= bound` for matchings.
    pub pass: bool,
}

/// `|C| / OPT` over `trials` seeded runs; pass iff `mean - ci95 <= bound`.
pub fn measure_ratio(
    algorithm: CoverAlgorithm,
    instance: &SetCoverInstance,
    eps: f64,
    trials: u64,
    seed: u64,
    bound: f64,
    exec: Execution,
) -> Result<RatioReport, OracleError> {
    crate::schedule::validate_eps(eps)?;
    let opt = exact_min_cover(instance)?;
    let stats = fold_trials(
        seed,
        trials,
        exec,
        RunningStats::new,
        |acc, _, rng| {
            let (c, _) = algorithm.run(instance, eps, rng).expect("eps validated");
            acc.push(if opt == 0 { 1.0 } else { c.size() as f64 / opt as f64 });
        },
        |mut a, b| {
            a.merge(&b);
            a
        },
    );
    let (mean, ci95) = (stats.mean(), stats.ci95());
    Ok(RatioReport { trials, mean_ratio: mean, ci95, opt, bound, pass: mean - ci95 <= bound })
}

/// `|M| / OPT` over `trials` seeded runs; pass iff `mean + ci95 >= bound`.
pub fn measure_matching_ratio(
    hg: &Hypergraph,
    eps: f64,
    trials: u64,
    seed: u64,
    bound: f64,
    exec: Execution,
) -> Result<RatioReport, OracleError> {
    let sampler = MatchingSampler::new(hg, eps)?;
    let opt = exact_max_matching(hg)?;
    let stats = fold_trials(
        seed,
        trials,
        exec,
        RunningStats::new,
        |acc, _, rng| {
            let (m, _) = sampler.run(rng);
            acc.push(if opt == 0 { 1.0 } else { m.size() as f64 / opt as f64 });
        },
        |mut a, b| {
            a.merge(&b);
            a
        },
    );
    let (mean, ci95) = (stats.mean(), stats.ci95());
    Ok(RatioReport { trials, mean_ratio: mean, ci95, opt, bound, pass: mean + ci95 >= bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::verify_cover;
    use crate::instance::{generate_random_instance, parse_instance};

    fn brute_force_cover(inst: &SetCoverInstance) -> usize {
        let n = inst.num_sets();
        (0u32..1 << n)
            .filter(|mask| {
                let mut cov = vec![false; inst.num_elements()];
                for s in (0..n).filter(|s| mask & (1 << s) != 0) {
                    inst.set(s).iter().for_each(|&t| cov[t] = true);
                }
                cov.iter().all(|&c| c)
            })
            .map(|m| m.count_ones() as usize)
            .min()
            .unwrap()
    }

    #[test]
    fn exact_cover_examples() {
        let one = parse_instance("p sc 1 3 3\ne 0 0\ne 0 1\ne 0 2").unwrap();
        assert_eq!(exact_min_cover(&one).unwrap(), 1);
        let disjoint = SetCoverInstance::from_sets(5, (0..5).map(|t| vec![t]).collect()).unwrap();
        assert_eq!(exact_min_cover(&disjoint).unwrap(), 5);
        let tri = SetCoverInstance::from_sets(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert_eq!(exact_min_cover(&tri).unwrap(), 2);
        let big = generate_random_instance(31, 40, 2, 0).unwrap();
        assert_eq!(exact_min_cover(&big), Err(OracleError::TooLarge { limit: 30, got: 31 }));
    }

    #[test]
    fn exact_cover_agrees_with_enumeration() {
        for seed in 0..40 {
            let n = 4 + (seed as usize % 9);
            let inst = generate_random_instance(n, 3 * n, 1 + seed as usize % 3, seed).unwrap();
            assert_eq!(exact_min_cover(&inst).unwrap(), brute_force_cover(&inst), "seed {seed}");
        }
    }

    #[test]
    fn exact_matching_examples() {
        assert_eq!(exact_max_matching(&Hypergraph::new(2, vec![vec![0, 1]]).unwrap()).unwrap(), 1);
        let star = Hypergraph::new(6, (1..6).map(|v| vec![0, v]).collect()).unwrap();
        assert_eq!(exact_max_matching(&star).unwrap(), 1);
        let tri = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert_eq!(exact_max_matching(&tri).unwrap(), 1);
        let path = Hypergraph::new(4, vec![vec![0, 1], vec![1, 2], vec![2, 3]]).unwrap();
        assert_eq!(exact_max_matching(&path).unwrap(), 2);
        let many = Hypergraph::new(60, (0..26).map(|e| vec![e, e + 1]).collect()).unwrap();
        assert!(matches!(exact_max_matching(&many), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn greedy_examples_and_bound() {
        let disjoint = SetCoverInstance::from_sets(4, (0..4).map(|t| vec![t]).collect()).unwrap();
        assert_eq!(greedy_cover(&disjoint).chosen_sets, vec![0, 1, 2, 3]);
        let one = parse_instance("p sc 1 3 3\ne 0 0\ne 0 1\ne 0 2").unwrap();
        assert_eq!(greedy_cover(&one).size(), 1);
        for seed in 0..30 {
            let inst = generate_random_instance(12, 30, 2, seed).unwrap();
            let g = greedy_cover(&inst);
            assert!(verify_cover(&inst, &g).is_valid());
            assert_eq!(g, greedy_cover(&inst));
            let opt = exact_min_cover(&inst).unwrap() as f64;
            assert!(g.size() as f64 <= harmonic(inst.delta()).unwrap() * opt + 1e-9);
        }
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(1).unwrap(), 1.0);
        assert_eq!(harmonic(2).unwrap(), 1.5);
        assert!((harmonic(4).unwrap() - 25.0 / 12.0).abs() < 1e-12);
        assert_eq!(harmonic(0), Err(OracleError::ZeroHarmonic));
    }

    #[test]
    fn ratio_on_forced_instances() {
        let disjoint = SetCoverInstance::from_sets(6, (0..6).map(|t| vec![t]).collect()).unwrap();
        for alg in [CoverAlgorithm::FOnline, CoverAlgorithm::FBucketed, CoverAlgorithm::HDelta { noise: 0.0 }] {
            let r = measure_ratio(alg, &disjoint, 0.1, 200, 1, 1.0, Execution::Parallel).unwrap();
            assert_eq!(r.mean_ratio, 1.0);
            assert!(r.pass);
        }
    }

    #[test]
    fn ratio_f_approx_random_fixture() {
        let inst = generate_random_instance(20, 60, 3, 2).unwrap();
        let bound = f_approx_bound(0.1, 3);
        assert!((bound - 4.2).abs() < 1e-12);
        let r = measure_ratio(CoverAlgorithm::FBucketed, &inst, 0.1, 200, 3, bound, Execution::Parallel).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
