use proptest::prelude::*;

use cover_sampler::cover::{f_approx_bucketed, f_approx_online, hdelta_cover, verify_cover, Exact, NoisyExact};
use cover_sampler::instance::{parse_hypergraph, parse_instance, to_hypergraph, SetCoverInstance};
use cover_sampler::matching::{verify_matching, MatchingSampler};
use cover_sampler::mpc::{plan_phases, PlannerConstants};
use cover_sampler::oracle::{exact_min_cover, greedy_cover};
use cover_sampler::schedule::Schedule;
use cover_sampler::ssp::{builtin_adversaries, run_ssp, SspConfig};
use cover_sampler::trials::trial_rng;

/// Random feasible instance: every element picks a nonempty subset of sets.
fn instance() -> impl Strategy<Value = SetCoverInstance> {
    (1usize..12, 0usize..40).prop_flat_map(|(sets, elements)| {
        prop::collection::vec(prop::collection::btree_set(0..sets, 1..=sets.min(4)), elements).prop_map(
            move |lists| {
                let mut by_set = vec![Vec::new(); sets];
                for (t, l) in lists.iter().enumerate() {
                    for &s in l {
                        by_set[s].push(t);
                    }
                }
                SetCoverInstance::from_sets(lists.len(), by_set).unwrap()
            },
        )
    })
}

fn eps() -> impl Strategy<Value = f64> {
    prop_oneof![Just(0.5), 0.01f64..0.5]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn instance_text_round_trip(inst in instance()) {
        let back = parse_instance(&inst.serialize()).unwrap();
        prop_assert_eq!(&back, &inst);
        let hg = to_hypergraph(&inst);
        prop_assert_eq!(parse_hypergraph(&hg.serialize()).unwrap(), hg.clone());
        prop_assert_eq!(hg.num_edges(), inst.num_elements());
        for t in 0..inst.num_elements() {
            prop_assert_eq!(hg.edge(t), inst.element(t));
        }
        for s in 0..inst.num_sets() {
            prop_assert!(inst.set(s).iter().all(|&t| inst.element(t).contains(&s)));
        }
    }

    #[test]
    fn schedule_shape(eps in eps(), delta in 1usize..5000) {
        let s = Schedule::outer(delta, eps).unwrap();
        let b = s.b();
        prop_assert_eq!(s.k() % b, 0);
        prop_assert!(s.p(s.k()) * delta as f64 <= eps * (1.0 + 1e-12));
        for i in 1..=s.k() {
            prop_assert!(s.p(i) <= s.p(i - 1));
            // Constant on blocks (b(j-1), bj].
            if (i - 1) % b != 0 {
                prop_assert_eq!(s.p(i), s.p(i - 1));
            }
        }
        let d = s.bucket_distribution();
        prop_assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(d.iter().all(|&x| x >= 0.0));
        let implied = s.bucket_sampler().implied_distribution();
        for (a, b) in implied.iter().zip(&d) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn covers_are_valid(inst in instance(), eps in eps(), seed in any::<u64>()) {
        let m = inst.num_edges() as u64;
        let (c, k) = f_approx_bucketed(&inst, eps, &mut trial_rng(seed, 0)).unwrap();
        prop_assert!(verify_cover(&inst, &c).is_valid());
        prop_assert!(k.edge_touches <= 2 * m);
        prop_assert!(k.element_touches <= inst.num_elements() as u64 + m);
        let (c, _) = f_approx_online(&inst, eps, &mut trial_rng(seed, 1)).unwrap();
        prop_assert!(verify_cover(&inst, &c).is_valid());
        let (c, _) = hdelta_cover(&inst, eps, &mut trial_rng(seed, 2), &mut Exact).unwrap();
        prop_assert!(verify_cover(&inst, &c).is_valid());
        let (c, _) = hdelta_cover(&inst, eps, &mut trial_rng(seed, 3), &mut NoisyExact::new(0.3, seed)).unwrap();
        prop_assert!(verify_cover(&inst, &c).is_valid());
    }

    #[test]
    fn exact_cover_is_a_lower_bound(inst in instance()) {
        let opt = exact_min_cover(&inst).unwrap();
        let g = greedy_cover(&inst);
        prop_assert!(verify_cover(&inst, &g).is_valid());
        prop_assert!(opt <= g.size());
    }

    #[test]
    fn matchings_are_disjoint(inst in instance(), eps in eps(), seed in any::<u64>()) {
        let hg = to_hypergraph(&inst);
        let (m, _) = MatchingSampler::new(&hg, eps).unwrap().run(&mut trial_rng(seed, 0));
        prop_assert!(verify_matching(&hg, &m).is_valid());
    }

    #[test]
    fn ssp_trace_shape(n in 1usize..300, eps in eps(), adv in 0usize..4, seed in any::<u64>()) {
        let (_, adversary) = builtin_adversaries(eps).swap_remove(adv);
        let cfg = SspConfig::new(n, eps, adversary, seed).unwrap();
        let tr = run_ssp(&cfg).unwrap();
        for w in tr.records.windows(2) {
            prop_assert_eq!(w[1].step + 1, w[0].step);
            prop_assert!(w[1].live <= w[0].live);
        }
        prop_assert!(tr.records.iter().all(|r| r.sampled <= r.live));
        let z = tr.records.iter().rev().find(|r| r.sampled > 0);
        match z {
            Some(r) => prop_assert_eq!((tr.z, tr.r_z), (r.step as i64, r.sampled)),
            None => prop_assert_eq!((tr.z, tr.r_z), (-1, 0)),
        }
    }

    #[test]
    fn plan_structure(eps in eps(), log_delta in 0u32..18, f in 1usize..64, log_n in 1u32..30, kappa in 0.001f64..2.0) {
        let n = 1usize << log_n;
        let c = PlannerConstants { tau_scale: 1.0, case1_exponent: kappa };
        let plan = plan_phases(1 << log_delta, f, eps, n, &c).unwrap();
        prop_assert_eq!(plan.phases.iter().map(|p| p.len).sum::<usize>(), plan.k + 1);
        let cap = (n as f64).ln().max(1.0);
        let mut next = plan.k as i64;
        for p in &plan.phases {
            prop_assert_eq!(p.start as i64, next);
            prop_assert!(p.len >= 1 && p.len as f64 <= cap);
            next -= p.len as i64;
        }
        prop_assert_eq!(next, -1);
        prop_assert_eq!(plan.predicted_mpc_rounds, plan.phases.iter().map(|p| p.rounds()).sum::<usize>());
    }
}
