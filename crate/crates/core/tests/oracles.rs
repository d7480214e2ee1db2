//! Worked examples checked against independent computations: bitmaps,
//! closed forms and brute-force enumeration.

use std::collections::BTreeSet;

use forcing_lab::diagram::{
    check_extension_pair, random_extension_constraints, CardinalLabel, DiagramAssignment, Node, Relation,
};
use forcing_lab::name_calculus::{make_name, refine_condition, Cell};
use forcing_lab::poset::{
    certificate, generic_run, phi_from_clopen, score, ExtendConfig, ScheduleEntry, Stem, WeightFunction,
};
use forcing_lab::sample;
use forcing_lab::smz_rapid::{
    cover_translate, density_profile, flatten_heavy_intervals, rapidity_check, thin_set_bound_check, IntervalSpec,
};
use forcing_lab::{plane, rat, BinaryString, ClopenPlaneSet, ClopenSet, Rational};
use rand::Rng;

/// Measure of a clopen set by counting points of `2^depth` it contains.
fn bitmap_measure(set: &ClopenSet, depth: usize) -> Rational {
    let count = BinaryString::all(depth).filter(|x| set.contains_cylinder(x)).count();
    Rational::dyadic(count as u64, depth as u32)
}

#[test]
fn refinement_with_small_dyadic_values() {
    // Coordinate k has two cells; the one labeled 1 is a single cylinder
    // of measure 2^{-ceil(log2 (k+2)^2)} <= 1/(k+2)^2.
    let lens: Vec<usize> = (0..6u64).map(|k| 64 - ((k + 2) * (k + 2) - 1).leading_zeros() as usize).collect();
    assert_eq!(lens, [2, 4, 4, 5, 6, 6]);
    let small: Vec<BinaryString> = (0..6).map(|k| BinaryString::from_index(lens[k], k as u64)).collect();
    let coords = small
        .iter()
        .map(|c| {
            let one = ClopenSet::cylinder(*c);
            vec![Cell::new(0, one.complement()), Cell::new(1, one)]
        })
        .collect();
    let g = make_name(coords).unwrap();
    let f = [1u64; 6];
    let r = refine_condition(&ClopenSet::full(), &g, &f, 1).unwrap();
    // 1/(n-1) < 1 first holds at n = 3.
    assert_eq!(r.n, 3);

    let removed: ClopenSet = small[3..].iter().copied().collect();
    let oracle = Rational::one() - bitmap_measure(&removed, 6);
    assert_eq!(r.q.measure(), oracle);
    assert_eq!(bitmap_measure(&r.q, 6), oracle);
    let tail_bound = Rational::one() - rat(1, 25) - rat(1, 36) - rat(1, 49);
    assert!(r.q.measure() >= tail_bound);
    assert!(r.q.measure() >= r.lower_bound);
}

#[test]
fn delta_for_halving_eps_is_closed_form() {
    let horizon = 5;
    let eps: Vec<Rational> = (0..=(horizon - 1usize).pow(3)).map(|n| Rational::pow2_neg(n as u32)).collect();
    let scales = cover_translate(&eps, horizon).unwrap();
    for n in 0..horizon {
        assert_eq!(scales.delta[n], Rational::pow2_neg((n.pow(3) + 1) as u32), "n = {n}");
        assert!(scales.delta[n] < eps[n.pow(3)]);
    }
    for pair in scales.delta_prime.chunks(2) {
        assert!(pair.iter().all(|d| *d == pair[0]));
    }
}

#[test]
fn full_heavy_levels_respect_eps() {
    let horizon = 4;
    let count: usize = (1..=horizon).map(|k| k * k - 1).sum();
    let eps: Vec<Rational> = (0..=count.max((horizon - 1).pow(3))).map(|n| Rational::pow2_neg(n as u32)).collect();
    let scales = cover_translate(&eps, horizon).unwrap();
    let heavy: Vec<Vec<IntervalSpec>> = (0..horizon)
        .map(|n| {
            (0..((n + 1) * (n + 1) - 1) as u64)
                .map(|k| IntervalSpec::grid(&scales.delta_prime[n], k).unwrap())
                .collect()
        })
        .collect();
    let j = flatten_heavy_intervals(&heavy, &scales.delta_prime, &eps).unwrap();
    assert_eq!(j.len(), count);
    // Position j lies in level n with sum_{k<n} ((k+1)^2 - 1) <= j.
    let mut index = 0;
    for (n, level) in heavy.iter().enumerate() {
        for _ in level {
            assert_eq!(j[index].length(), scales.delta_prime[n]);
            assert!(j[index].length() <= Rational::pow2_neg(index as u32));
            index += 1;
        }
    }
}

#[test]
fn cube_density_and_thin_bound() {
    let cubes: BTreeSet<u64> = (0..=100u64).map(|k| k * k * k).collect();
    let profile = density_profile(&cubes, 1000);
    for m in 0..1000u64 {
        let hits = (0..=100u64).filter(|k| (m * m..(m + 1) * (m + 1)).contains(&(k * k * k))).count();
        assert_eq!(profile.values()[m as usize], Rational::new(hits as i64, (2 * m + 1) as i64), "m = {m}");
    }
    assert_eq!(profile.values()[2], rat(1, 5));
    let verdict = thin_set_bound_check(&cubes, 1000).unwrap();
    assert!(verdict.holds);
}

#[test]
fn rapidity_for_sparse_powers_of_ten() {
    let x: BTreeSet<u64> = [1, 10, 100, 1000].into();
    let f: Vec<u64> = (0..12).map(|n| 1 << n).collect();
    for (n, bound) in f.iter().enumerate() {
        assert!(x.range(..bound).count() <= n);
    }
    let mut rng = sample::rng(5);
    for _ in 0..50 {
        let r = sample::block_choice(&mut rng, 1001);
        let a: BTreeSet<u64> = x.iter().map(|&i| r[i as usize]).collect();
        let oracle = (0..f.len()).all(|n| a.range(..f[n]).count() <= n);
        let verdict = rapidity_check(&r, &x, &f).unwrap();
        assert!(oracle);
        assert_eq!(verdict.holds, oracle);
    }
}

fn rect_measure(f: &ClopenPlaneSet, s: &BinaryString, t: &BinaryString) -> Rational {
    f.intersect(&ClopenPlaneSet::rectangle(*s, *t)).measure()
}

/// Same as [`rect_measure`], summed over the disjoint rectangles of `F`
/// without building the intersection.
fn rect_measure_by_sum(f: &ClopenPlaneSet, s: &BinaryString, t: &BinaryString) -> Rational {
    let meet = |a: &BinaryString, b: &BinaryString| if a.comparable(b) { a.len().max(b.len()) } else { usize::MAX };
    f.rects()
        .filter_map(|(a, b)| {
            let (x, y) = (meet(&a, s), meet(&b, t));
            (x != usize::MAX && y != usize::MAX).then(|| Rational::pow2_neg((x + y) as u32))
        })
        .sum()
}

#[test]
fn weight_from_set_matches_plane_measure() {
    let mut rng = sample::rng(21);
    for _ in 0..200 {
        let f = sample::plane_set(&mut rng, 2, 2, 0.5);
        let phi = phi_from_clopen(&f).unwrap();
        let sl = rng.random_range(0..=4);
        let tl = rng.random_range(0..=4);
        let s = sample::string(&mut rng, sl);
        let t = sample::string(&mut rng, tl);
        let direct = rect_measure(&f, &s, &t);
        assert_eq!(direct, rect_measure_by_sum(&f, &s, &t));
        assert_eq!(phi.eval(&s, &t), direct, "F = {f:?}, s = {s}, t = {t}");
    }
}

#[test]
fn deep_score_counts_rectangles_inside() {
    let mut rng = sample::rng(33);
    for _ in 0..100 {
        let f = sample::plane_set(&mut rng, 2, 2, 0.6);
        let phi = phi_from_clopen(&f).unwrap();
        let m = rng.random_range(2..=5);
        let head = sample::string(&mut rng, 2);
        let base = sample::stem(&mut rng, m, 2);
        let levels = (0..=m).map(|j| base.level(j).iter().map(|t| head.concat(t)).collect()).collect();
        let stem = Stem::from_levels(levels).unwrap();
        let inside = BinaryString::all(m)
            .filter(|s| {
                let t = stem.get(s);
                f.contains_index(s.prefix(2).index(), t.prefix(2).index())
            })
            .count();
        assert_eq!(score(&stem, &phi), Rational::dyadic(inside as u64, m as u32));
    }
}

#[test]
fn empty_stem_scores_plane_measure() {
    let mut rng = sample::rng(34);
    for _ in 0..50 {
        let f = sample::plane_set(&mut rng, 3, 2, 0.4);
        if let Ok(phi) = phi_from_clopen(&f) {
            assert_eq!(score(&Stem::trivial(), &phi), f.measure());
        }
    }
    assert_eq!(score(&Stem::trivial(), &WeightFunction::full()), Rational::one());
}

#[test]
fn two_small_covers_stay_avoided() {
    let schedule = vec![
        ScheduleEntry { cover: plane(&[("00", "00")]), epsilon: rat(1, 4), at_step: 0 },
        ScheduleEntry { cover: plane(&[("11", "11")]), epsilon: rat(1, 4), at_step: 1 },
    ];
    for g in &schedule {
        assert_eq!(g.cover.measure(), rat(1, 16));
    }
    let run = generic_run(&schedule, 4, 99, &ExtendConfig::default()).unwrap();
    assert!(run.all_hold());
    let p = &run.last;
    assert!(p.depth() >= 4);
    for entry in &schedule {
        let f = entry.cover.complement();
        // scoreF = sum over s of 2^{|h(s)|} * mu([s] x [h(s)] ∩ F).
        let direct: Rational = p
            .stem
            .pairs()
            .filter(|(s, _)| s.len() == p.depth())
            .map(|(s, t)| rect_measure_by_sum(&f, &s, t).scale_pow2(t.len() as i64))
            .sum();
        assert!(direct > rat(3, 4));
        assert_eq!(certificate(p, &f).score_f, direct);
    }
}

fn a(entries: &[(Node, u8)]) -> DiagramAssignment {
    entries.iter().fold(DiagramAssignment::constant(CardinalLabel::ALEPH_1), |acc, &(n, k)| {
        acc.with(n, CardinalLabel::aleph(k).unwrap())
    })
}

#[test]
fn transfer_examples() {
    let aleph2 = CardinalLabel::aleph(2).unwrap();
    let ground = a(&[(Node::B, 2), (Node::D, 2), (Node::NonM, 2), (Node::CofM, 2), (Node::CofN, 2), (Node::NonN, 2)])
        .with(Node::CovStarN, aleph2)
        .with(Node::NonStarN, aleph2);
    let cs = random_extension_constraints(&ground).unwrap();
    assert!(cs.iter().any(|c| c.node == Node::CovN && c.relation == Relation::Ge && c.bound == aleph2));
    assert!(cs.iter().any(|c| c.node == Node::NonN && c.relation == Relation::Le && c.bound == aleph2));

    let ground = a(&[(Node::CovStarN, 2), (Node::NonM, 2), (Node::CofN, 2), (Node::D, 2), (Node::CofM, 2)]);
    let ext = ground.clone().with(Node::CovN, aleph2);
    let v = check_extension_pair(&ground, &ext);
    assert!(v.accepted(), "{v:?}");
    let moved_b = ext.clone().with(Node::B, aleph2);
    assert!(!check_extension_pair(&ground, &moved_b).accepted());
}
