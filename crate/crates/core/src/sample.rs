//! Seeded random instances for tests, examples and the bundled self-test.
//!
//! Every generator takes an `Rng` so callers decide on seeding; [`rng`]
//! gives the reproducible ChaCha stream used throughout the crate.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dyadic_measure::{BinaryString, ClopenPlaneSet, ClopenSet, Rational};
use crate::name_calculus::{make_name, slalom_extract, Cell, FiniteName};
use crate::poset::{score, Condition, Stem, TaggedWeight, WeightFunction};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn string<R: Rng>(rng: &mut R, len: usize) -> BinaryString {
    if len == 0 {
        return BinaryString::EMPTY;
    }
    let bits: u64 = rng.random();
    BinaryString::from_index(len, if len == 64 { bits } else { bits & ((1 << len) - 1) })
}

/// A union of up to 6 random cylinders of length at most `max_depth`.
pub fn clopen_set<R: Rng>(rng: &mut R, max_depth: usize) -> ClopenSet {
    let count = rng.random_range(0..=6);
    (0..count)
        .map(|_| {
            let len = rng.random_range(0..=max_depth);
            // Short cylinders would swamp everything; keep them rare.
            let len = if len == 0 && rng.random_bool(0.8) { max_depth } else { len };
            string(rng, len)
        })
        .collect()
}

/// A clopen set of measure at least `min_measure`.
pub fn clopen_set_at_least<R: Rng>(rng: &mut R, max_depth: usize, min_measure: &Rational) -> ClopenSet {
    loop {
        let c = clopen_set(rng, max_depth);
        if &c.measure() >= min_measure {
            return c;
        }
    }
}

/// A labeled partition at depth `1..=max_depth` with up to 6 labels drawn
/// from `0..20`, some of them heavy.
pub fn partition<R: Rng>(rng: &mut R, max_depth: usize) -> Vec<Cell> {
    let depth = rng.random_range(1..=max_depth);
    let mut labels: Vec<u64> = (0..20).collect();
    labels.shuffle(rng);
    labels.truncate(rng.random_range(1..=6));
    let mut groups: BTreeMap<u64, Vec<BinaryString>> = BTreeMap::new();
    for s in BinaryString::all(depth) {
        // Squaring the uniform draw favors the first labels.
        let u: f64 = rng.random();
        let i = ((u * u) * labels.len() as f64) as usize;
        groups.entry(labels[i.min(labels.len() - 1)]).or_default().push(s);
    }
    groups.into_iter().map(|(label, gens)| Cell::new(label, ClopenSet::canonicalize(gens))).collect()
}

pub fn name<R: Rng>(rng: &mut R, horizon: usize, max_depth: usize) -> FiniteName {
    make_name((0..horizon).map(|_| partition(rng, max_depth)).collect()).expect("partitions are exact")
}

/// `f` avoiding the slalom of `g` from `big_n` on: a light label when one
/// exists, otherwise a label the name never uses.
pub fn avoiding_sequence<R: Rng>(rng: &mut R, g: &FiniteName, big_n: usize) -> Vec<u64> {
    let slalom = slalom_extract(g);
    (0..g.horizon())
        .map(|k| {
            let light: Vec<u64> =
                g.cells(k).iter().map(|c| c.label).filter(|l| k < big_n || !slalom.catches(k, *l)).collect();
            if !light.is_empty() && rng.random_bool(0.7) {
                light[rng.random_range(0..light.len())]
            } else {
                100 + k as u64
            }
        })
        .collect()
}

/// A random plane set at resolution `(r1, r2)`, each rectangle kept with
/// probability `density`.
pub fn plane_set<R: Rng>(rng: &mut R, r1: usize, r2: usize, density: f64) -> ClopenPlaneSet {
    let rects: Vec<(BinaryString, BinaryString)> = BinaryString::all(r1)
        .flat_map(|s| BinaryString::all(r2).map(move |t| (s, t)))
        .filter(|_| rng.random_bool(density))
        .collect();
    ClopenPlaneSet::at_resolution(r1, r2, rects).expect("resolution is small")
}

/// Table entries are multiples of a quarter of the cap `2^{-(M1+M2)}`.
pub fn weight<R: Rng>(rng: &mut R, m1: usize, m2: usize) -> WeightFunction {
    let cap = Rational::pow2_neg((m1 + m2) as u32);
    loop {
        let table: Vec<Rational> =
            (0..1usize << (m1 + m2)).map(|_| &cap * rng.random_range(0..=4u64) / Rational::from(4u64)).collect();
        if let Ok(w) = WeightFunction::new(m1, m2, table) {
            return w;
        }
    }
}

/// A monotone stem of depth `m` where each child adds up to `max_growth` bits.
pub fn stem<R: Rng>(rng: &mut R, m: usize, max_growth: usize) -> Stem {
    let len = rng.random_range(0..=max_growth);
    let root = string(rng, len);
    let mut levels = vec![vec![root]];
    for j in 1..=m {
        let level: Vec<BinaryString> = (0..1usize << j)
            .map(|i| {
                let parent = levels[j - 1][i >> 1];
                let len = rng.random_range(0..=max_growth);
                let extra = string(rng, len);
                parent.concat(&extra)
            })
            .collect();
        levels.push(level);
    }
    Stem::from_levels(levels).expect("levels have the right sizes")
}

/// A valid condition: depth at most `max_depth`, up to `max_weights`
/// weights at resolution at most `max_res` in each coordinate, each tagged
/// with half its score.
pub fn condition<R: Rng>(rng: &mut R, max_depth: usize, max_weights: usize, max_res: usize) -> Condition {
    let m = rng.random_range(0..=max_depth);
    let stem = stem(rng, m, 2);
    let n = rng.random_range(0..=max_weights);
    let mut weights = Vec::with_capacity(n);
    while weights.len() < n {
        let (m1, m2) = (rng.random_range(0..=max_res), rng.random_range(0..=max_res));
        let phi = weight(rng, m1, m2);
        let sc = score(&stem, &phi);
        if sc.is_positive() {
            weights.push(TaggedWeight::new(sc.scale_pow2(-1), phi));
        }
    }
    Condition::new(stem, weights)
}

/// Pairs of distinct valid conditions sharing their centered-piece index.
///
/// Conditions are drawn over a small pool of stems and tag lists so that
/// indices collide often.
pub fn centered_pairs<R: Rng>(rng: &mut R, count: usize) -> Vec<(Condition, Condition)> {
    use crate::poset::sigma_centered_index;

    let stems: Vec<Stem> = (0..3).map(|i| stem(rng, i % 3, 1)).collect();
    let tag_lists = [vec![Rational::new(1, 8)], vec![Rational::new(1, 8), Rational::new(1, 4)]];
    let mut buckets: BTreeMap<String, Vec<Condition>> = BTreeMap::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let stem = stems[rng.random_range(0..stems.len())].clone();
        let tags = &tag_lists[rng.random_range(0..tag_lists.len())];
        let mut weights = Vec::new();
        for eps in tags {
            let (m1, m2) = (rng.random_range(0..=2), rng.random_range(0..=2));
            let phi = weight(rng, m1, m2);
            if &score(&stem, &phi) <= eps {
                break;
            }
            weights.push(TaggedWeight::new(eps.clone(), phi));
        }
        if weights.len() != tags.len() {
            continue;
        }
        let p = Condition::new(stem, weights);
        let index = sigma_centered_index(&p).expect("valid by construction");
        let key = serde_json::to_string(&index).expect("index serializes");
        let bucket = buckets.entry(key).or_default();
        if let Some(q) = bucket.iter().find(|q| **q != p) {
            out.push((q.clone(), p.clone()));
        }
        bucket.push(p);
    }
    out
}

/// `r(n) ∈ [n², (n+1)²)` for `n < len`.
pub fn block_choice<R: Rng>(rng: &mut R, len: usize) -> Vec<u64> {
    (0..len as u64).map(|n| rng.random_range(n * n..(n + 1) * (n + 1))).collect()
}

/// An increasing `f` of length `len` and a set `X ⊆ [0, domain)` with
/// `|X ∩ f(n)| ≤ n` for every `n < len`.
pub fn rapid_witness<R: Rng>(rng: &mut R, len: usize, domain: u64) -> (BTreeSet<u64>, Vec<u64>) {
    let mut f = Vec::with_capacity(len);
    let mut last = 0u64;
    for _ in 0..len {
        last += rng.random_range(1..=domain / len as u64 + 1);
        f.push(last);
    }
    let mut x = BTreeSet::new();
    for _ in 0..2 * len {
        let v = rng.random_range(0..domain);
        x.insert(v);
        let ok = f.iter().enumerate().all(|(n, &b)| x.range(..b).count() <= n);
        if !ok {
            x.remove(&v);
        }
    }
    (x, f)
}

/// A random subset of `[0, bound)` with each element kept with probability `density`.
pub fn naturals<R: Rng>(rng: &mut R, bound: u64, density: f64) -> BTreeSet<u64> {
    (0..bound).filter(|_| rng.random_bool(density)).collect()
}
