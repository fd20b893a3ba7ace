use proptest::prelude::*;

use ermlab::capacity::{induced_partitions, vc_dimension, worst_case_gen_error};
use ermlab::decomposition::{approximation_error, tradeoff_experiment, LearnerMode};
use ermlab::dnf3::{dnf_as_expanded_conjunction, learn_3dnf_via_expansion, psi_expand, random_3dnf_target, ExpansionMap};
use ermlab::erm::{erm_exhaustive, erm_set, greedy_approx_erm, optimization_error};
use ermlab::facts::{random_distribution, random_predicate, Fixture};
use ermlab::hypotheses::Hypothesis;
use ermlab::{draw_dataset, empirical_risk, exact_risk, BitVector, DomainSpec, FiniteDistribution, HypothesisClass, Seed};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn erm_picks_first_minimizer(seed in any::<u64>()) {
        let f = Fixture::random(Seed(seed)).unwrap();
        let r = erm_exhaustive(&f.h_i, &f.sample).unwrap();
        let all = erm_set(&f.h_i, &f.sample).unwrap();
        prop_assert_eq!(&r.chosen, &all[0]);
        prop_assert_eq!(r.minimizer_count, all.len() as u64);
        for h in f.h_i.enumerate().unwrap() {
            prop_assert!(empirical_risk(&h, &f.sample).unwrap() >= r.min_empirical_risk);
        }
    }

    #[test]
    fn restriction_never_helps_class_level_quantities(seed in any::<u64>()) {
        let f = Fixture::random(Seed(seed)).unwrap();
        prop_assert!(approximation_error(&f.h, &f.dist).unwrap() <= approximation_error(&f.h_i, &f.dist).unwrap());
        prop_assert!(worst_case_gen_error(&f.h_i, &f.sample, &f.dist).unwrap() <= worst_case_gen_error(&f.h, &f.sample, &f.dist).unwrap());
        let d = f.h.domain();
        prop_assert!(vc_dimension(&f.h_i, d, 8).unwrap().value <= vc_dimension(&f.h, d, 8).unwrap().value);
    }

    #[test]
    fn optimization_error_is_nonnegative_and_zero_at_full_budget(seed in any::<u64>(), budget in 1u64..40) {
        let f = Fixture::random(Seed(seed)).unwrap();
        let h = greedy_approx_erm(&f.h, &f.sample, budget, Seed(seed ^ 1)).unwrap();
        prop_assert!(optimization_error(&h, &f.h, &f.sample).unwrap() >= 0.0);
        let card = f.h.cardinality().unwrap() as u64;
        let full = greedy_approx_erm(&f.h, &f.sample, card, Seed(seed)).unwrap();
        prop_assert_eq!(optimization_error(&full, &f.h, &f.sample).unwrap(), 0.0);
    }

    #[test]
    fn induced_count_is_bounded(seed in any::<u64>(), k in 1usize..5) {
        let f = Fixture::random(Seed(seed)).unwrap();
        let points: Vec<BitVector> = DomainSpec::new(f.h.n()).unwrap().points().unwrap().take(k).collect();
        let cert = induced_partitions(&f.h, &points).unwrap();
        prop_assert!(cert.induced_count <= 1u128 << points.len());
        prop_assert!(cert.induced_count <= f.h.cardinality().unwrap());
    }

    #[test]
    fn draws_follow_the_distribution_support(seed in any::<u64>(), m in 1usize..200) {
        let mut rng = Seed(seed).rng();
        let dist = random_distribution(3, &mut rng).unwrap();
        let s = draw_dataset(&dist, m, Seed(seed));
        prop_assert_eq!(s.m(), m);
        for e in s.iter() {
            prop_assert!(dist.support().iter().any(|a| a.x == e.x && a.y == e.y && a.p > 0.0));
        }
        prop_assert_eq!(&s, &draw_dataset(&dist, m, Seed(seed)));
    }

    #[test]
    fn expansion_is_consistent_on_random_targets(n in 1usize..=7, seed in any::<u64>(), m in 1usize..120) {
        let target = random_3dnf_target(n, Seed(seed)).unwrap();
        let dist = FiniteDistribution::uniform_realizable(n, &target).unwrap();
        let sample = draw_dataset(&dist, m, Seed(seed.wrapping_add(1)));
        let h = learn_3dnf_via_expansion(&sample, n).unwrap();
        prop_assert_eq!(empirical_risk(&h, &sample).unwrap(), 0.0);

        let Hypothesis::ThreeTermDnf(dnf) = &target else { unreachable!() };
        let map = ExpansionMap::new(n);
        let conj = dnf_as_expanded_conjunction(dnf, &map).unwrap();
        for e in sample.iter() {
            prop_assert_eq!(conj.inner().satisfied_by(&psi_expand(&e.x, &map).unwrap()), e.y.is_positive());
        }
    }

    #[test]
    fn tradeoff_identities_hold_per_trial(seed in any::<u64>(), m in 1usize..30) {
        let mut rng = Seed(seed).rng();
        let h = HypothesisClass::trees(2, 2).unwrap();
        let h_i = h.restrict(random_predicate(&mut rng));
        prop_assume!(h_i.cardinality().unwrap() > 0);
        let dist = random_distribution(2, &mut rng).unwrap();
        let r = tradeoff_experiment(&h, &h_i, &dist, m, 5, Seed(seed), LearnerMode::Exhaustive).unwrap();
        prop_assert!(r.appincr >= 0.0);
        for t in 0..r.trials {
            prop_assert!((r.appincr + r.estdecr_samples[t] - r.risk_gap_samples[t]).abs() < 1e-12);
            prop_assert!((r.emp_gap_samples[t] + r.gen_gap_samples[t] - r.risk_gap_samples[t]).abs() < 1e-12);
            prop_assert!(r.emp_gap_samples[t] >= 0.0);
            prop_assert!(r.risk_h_samples[t] >= r.approx_h - 1e-12);
        }
    }
}

#[test]
fn greedy_beyond_cardinality_matches_exhaustive() {
    for s in 0..30 {
        let f = Fixture::random(Seed(s)).unwrap();
        let card = f.h_i.cardinality().unwrap() as u64;
        let g = greedy_approx_erm(&f.h_i, &f.sample, card, Seed(s)).unwrap();
        assert_eq!(g, erm_exhaustive(&f.h_i, &f.sample).unwrap().chosen);
        let _ = exact_risk(&g, &f.dist).unwrap();
    }
}
