use std::collections::BTreeSet;

use proptest::prelude::*;

use forcing_lab::diagram::{
    check_assignment, random_extension_constraints, CardinalLabel, Constraint, DiagramAssignment, Node, Relation,
};
use forcing_lab::name_calculus::{heavy_values, slalom_extract};
use forcing_lab::poset::{extend, one_bit_growth, score, ExtendConfig, WeightFunction};
use forcing_lab::sample;
use forcing_lab::smz_rapid::{density_profile, product_bound, rapidity_check};
use forcing_lab::Rational;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn clopen_algebra_laws(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let a = sample::clopen_set(&mut rng, 6);
        let b = sample::clopen_set(&mut rng, 6);
        prop_assert_eq!(a.complement().complement(), a.clone());
        prop_assert_eq!(a.union(&b).complement(), a.complement().intersect(&b.complement()));
        prop_assert_eq!(a.difference(&b), a.intersect(&b.complement()));
        prop_assert_eq!(a.union(&b).measure() + a.intersect(&b).measure(), a.measure() + b.measure());
        prop_assert_eq!(a.measure() + a.complement().measure(), Rational::one());
        prop_assert!(a.intersect(&b).is_subset(&a));
    }

    #[test]
    fn weight_eval_is_additive(seed in any::<u64>(), sl in 0usize..5, tl in 0usize..5) {
        let mut rng = sample::rng(seed);
        let (m1, m2) = (rng.random_range(0..=3), rng.random_range(0..=3));
        let phi = sample::weight(&mut rng, m1, m2);
        let s = sample::string(&mut rng, sl);
        let t = sample::string(&mut rng, tl);
        let whole = phi.eval(&s, &t);
        prop_assert_eq!(&whole, &(phi.eval(&s.child(0), &t) + phi.eval(&s.child(1), &t)));
        prop_assert_eq!(&whole, &(phi.eval(&s, &t.child(0)) + phi.eval(&s, &t.child(1))));
        prop_assert!(whole <= Rational::pow2_neg((sl + tl) as u32));
    }

    #[test]
    fn full_weight_scores_one(seed in any::<u64>(), m in 0usize..7) {
        let mut rng = sample::rng(seed);
        let stem = sample::stem(&mut rng, m, 3);
        prop_assert_eq!(score(&stem, &WeightFunction::full()), Rational::one());
    }

    #[test]
    fn heavy_values_obey_pigeonhole(seed in any::<u64>(), d in 1i64..12) {
        let mut rng = sample::rng(seed);
        let cells = sample::partition(&mut rng, 5);
        let t = Rational::new(1, d);
        let heavy = heavy_values(&cells, &t).unwrap();
        prop_assert!((heavy.len() as i64) < d);
    }

    #[test]
    fn slalom_slots_below_square(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let g = sample::name(&mut rng, 6, 5);
        let s = slalom_extract(&g);
        for n in 0..g.horizon() {
            prop_assert!(s.slot(n).len() < (n + 1) * (n + 1));
        }
    }

    #[test]
    fn density_in_unit_interval(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let density: f64 = rng.random();
        let a = sample::naturals(&mut rng, 900, density);
        let profile = density_profile(&a, 30);
        prop_assert!(profile.values().iter().all(|v| !v.is_negative() && v <= &Rational::one()));
    }

    #[test]
    fn product_is_antitone(seed in any::<u64>(), n in 0usize..5) {
        let mut rng = sample::rng(seed);
        let a = sample::naturals(&mut rng, 400, 0.3);
        let extra = sample::naturals(&mut rng, 400, 0.2);
        let bigger: BTreeSet<u64> = a.union(&extra).copied().collect();
        let x = sample::naturals(&mut rng, 20, 0.5);
        let mut last = Rational::one();
        for big_m in n..20 {
            let p = product_bound(&a, &x, n, big_m);
            prop_assert!(p <= last);
            prop_assert!(product_bound(&bigger, &x, n, big_m) <= p);
            last = p;
        }
    }

    #[test]
    fn rapidity_follows_from_witness(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let (x, f) = sample::rapid_witness(&mut rng, 10, 200);
        let r = sample::block_choice(&mut rng, 200);
        prop_assert!(rapidity_check(&r, &x, &f).unwrap().holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn extension_stays_valid(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let p = sample::condition(&mut rng, 3, 2, 2);
        prop_assert!(p.validate().is_ok());
        let (q, report) = extend(&p, seed, &ExtendConfig::default()).unwrap();
        prop_assert!(q.validate().is_ok());
        prop_assert!(q.extends(&p));
        prop_assert!(one_bit_growth(&p.stem, &q.stem));
        prop_assert!(report.to_depth > report.from_depth);
    }
}

fn from_bits(bits: u16) -> DiagramAssignment {
    let labels = [CardinalLabel::ALEPH_1, CardinalLabel::aleph(2).unwrap()];
    Node::ALL
        .iter()
        .enumerate()
        .fold(DiagramAssignment::constant(labels[0]), |a, (i, &n)| a.with(n, labels[(bits >> i) as usize & 1]))
}

/// All 4096 two-label assignments, so every valid ground is covered.
#[test]
fn raising_a_lower_bound_source_keeps_constraints() {
    let aleph2 = CardinalLabel::aleph(2).unwrap();
    let lower = |cs: &[Constraint]| {
        cs.iter().filter(|c| c.node == Node::CovN && c.relation == Relation::Ge).map(|c| c.bound).max()
    };
    let mut compared = 0;
    for bits in 0u16..4096 {
        let ground = from_bits(bits);
        if !check_assignment(&ground).is_empty() {
            continue;
        }
        let before = random_extension_constraints(&ground).unwrap();
        for source in [Node::B, Node::CovN] {
            let raised = ground.clone().with(source, aleph2);
            if raised == ground || !check_assignment(&raised).is_empty() {
                continue;
            }
            let after = random_extension_constraints(&raised).unwrap();
            for c in &before {
                assert!(after.iter().any(|d| d.node == c.node && d.relation == c.relation), "{c} lost");
            }
            assert!(lower(&after) >= lower(&before));
            compared += 1;
        }
    }
    assert!(compared > 0);
}
