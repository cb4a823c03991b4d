use statrs::distribution::{ChiSquared, ContinuousCDF};

use cover_sampler::cover::{f_approx_bucketed, f_approx_online, hdelta_cover_traced, Exact};
use cover_sampler::instance::{generate_random_instance, Hypergraph};
use cover_sampler::matching::MatchingSampler;
use cover_sampler::schedule::Schedule;
use cover_sampler::ssp::{
    estimate_conditional_multiplicity, estimate_expected_rz, DeleteSampledNeighbors, HalveEachStep, Identity,
    SspConfig,
};
use cover_sampler::stats::{ks_distance, RunningStats};
use cover_sampler::trials::{map_trials, trial_rng, Execution};
use std::sync::Arc;

const EXEC: Execution = Execution::Parallel;

#[test]
fn alias_sampler_passes_chi_square() {
    let s = Schedule::outer(8, 0.5).unwrap();
    let probs = s.bucket_distribution();
    let table = s.bucket_sampler();
    let draws = 1_000_000u64;
    let mut counts = vec![0u64; probs.len()];
    let mut rng = trial_rng(42, 0);
    for _ in 0..draws {
        counts[table.sample(&mut rng)] += 1;
    }
    // Pool cells with tiny expectation into the last one.
    let (mut stat, mut cells, mut pooled_obs, mut pooled_exp) = (0.0, 0, 0.0, 0.0);
    for (c, p) in counts.iter().zip(&probs) {
        let e = p * draws as f64;
        if e < 5.0 {
            pooled_obs += *c as f64;
            pooled_exp += e;
        } else {
            stat += (*c as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
    }
    let p_value = 1.0 - ChiSquared::new((cells - 1) as f64).unwrap().cdf(stat);
    assert!(p_value > 0.001, "chi2 {stat} over {cells} cells, p {p_value}");
}

#[test]
fn expected_rz_examples() {
    let cfg = SspConfig::new(100, 0.1, Arc::new(Identity), 1).unwrap();
    let e = estimate_expected_rz(&cfg, 100_000, EXEC).unwrap();
    assert!(e.mean - e.ci95 <= 1.4, "{e:?}");
    let cfg = SspConfig::new(50, 0.25, Arc::new(HalveEachStep), 2).unwrap();
    let e = estimate_expected_rz(&cfg, 100_000, EXEC).unwrap();
    assert!(e.mean - e.ci95 <= 2.0, "{e:?}");
    let cfg = SspConfig::new(1, 0.25, Arc::new(Identity), 3).unwrap();
    assert_eq!(estimate_expected_rz(&cfg, 1000, EXEC).unwrap().mean, 1.0);
}

#[test]
fn conditional_multiplicity_examples() {
    let cfg = SspConfig::new(100, 0.05, Arc::new(Identity), 4).unwrap();
    let e = estimate_conditional_multiplicity(&cfg, 1_000_000, EXEC).unwrap();
    assert!(e.mean - e.ci95 <= 0.30, "{e:?}");
    let cfg = SspConfig::new(200, 0.1, Arc::new(DeleteSampledNeighbors { rate: 0.5 }), 5).unwrap();
    let e = estimate_conditional_multiplicity(&cfg, 1_000_000, EXEC).unwrap();
    assert!(e.mean - e.ci95 <= 0.6, "{e:?}");
    let cfg = SspConfig::new(1, 0.1, Arc::new(Identity), 6).unwrap();
    assert_eq!(estimate_conditional_multiplicity(&cfg, 1000, EXEC).unwrap().mean, 0.0);
}

#[test]
fn star_matching_is_rarely_empty() {
    let eps = 0.05;
    let d = 10;
    let hg = Hypergraph::new(d + 1, (1..=d).map(|v| vec![0, v]).collect()).unwrap();
    let sampler = MatchingSampler::new(&hg, eps).unwrap();
    let sizes = map_trials(7, 10_000, EXEC, |_, rng| sampler.run(rng).0.size() as f64);
    assert!(sizes.iter().all(|&s| s <= 1.0));
    let mean = sizes.iter().sum::<f64>() / sizes.len() as f64;
    assert!(mean >= 1.0 - 6.0 * eps, "mean {mean}");
}

#[test]
fn online_and_bucketed_sizes_agree_in_law() {
    for (sets, elements, f, seed) in [(10, 30, 3, 1), (15, 60, 2, 2), (8, 40, 4, 3)] {
        let inst = generate_random_instance(sets, elements, f, seed).unwrap();
        let a = map_trials(seed, 10_000, EXEC, |_, rng| f_approx_online(&inst, 0.1, rng).unwrap().0.size() as f64);
        let b = map_trials(seed + 100, 10_000, EXEC, |_, rng| {
            f_approx_bucketed(&inst, 0.1, rng).unwrap().0.size() as f64
        });
        let d = ks_distance(&a, &b);
        assert!(d < 0.05, "KS {d}");
    }
}

#[test]
fn batch_multiplicity_per_covered_element() {
    let eps = 0.1;
    let inst = generate_random_instance(40, 400, 4, 9).unwrap();
    let per_run = map_trials(11, 10_000, EXEC, |_, rng| {
        let (_, _, trace) = hdelta_cover_traced(&inst, eps, rng, &mut Exact).unwrap();
        let mult: usize = trace.batches.iter().map(|b| b.multiplicity_sum).sum();
        let newly: usize = trace.batches.iter().map(|b| b.newly_covered).sum();
        assert_eq!(newly, inst.num_elements());
        mult as f64 / newly as f64
    });
    let stats: RunningStats = per_run.into_iter().collect();
    assert!(stats.mean() - stats.ci95() <= 1.0 + 4.0 * eps, "{} +/- {}", stats.mean(), stats.ci95());
}
