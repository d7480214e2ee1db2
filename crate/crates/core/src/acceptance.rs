//! The bundled self-test: eleven checks of the finite machinery against
//! brute-force oracles, driven by a JSON fixture.
//!
//! The oracles here deliberately avoid the code paths they check: set
//! algebra is compared with 256-bit bitmaps, scores with direct sums,
//! extension targets with enumeration of every labeling, and the diagram
//! checker with a separate edge table.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::diagram::{
    check_assignment, check_extension_pair, random_extension_constraints, CardinalLabel, DiagramAssignment, Node,
    Relation,
};
use crate::dyadic_measure::{BinaryString, ClopenPlaneSet, ClopenSet, Rational};
use crate::name_calculus::{refine_condition, slalom_extract, slalom_threshold, FiniteName};
use crate::poset::{
    exact_variance, extend, extension_delta, generic_run, merge_same_stem, one_bit_growth, otimes_holds, score,
    sigma_centered_index, Condition, ExtendConfig, ScheduleEntry, Stem, TaggedWeight, WeightFunction,
};
use crate::sample;
use crate::smz_rapid::{
    cover_translate, flatten_heavy_intervals, product_bound, rapidity_check, thin_set_bound_check, IntervalSpec,
};

pub const BUNDLED_FIXTURE: &str = include_str!("../fixtures/acceptance.json");

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Fixture {
    pub version: u32,
    pub seed: u64,
    pub set_algebra: SetAlgebraParams,
    pub slalom: SlalomParams,
    pub refinement: RefinementParams,
    pub extension: ExtensionParams,
    pub chebyshev: ChebyshevParams,
    pub null_avoidance: NullAvoidanceParams,
    pub full_weight: FullWeightParams,
    pub centered: CenteredParams,
    pub smz: SmzParams,
    pub rapid: RapidParams,
    pub diagram: DiagramParams,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetAlgebraParams {
    pub count: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlalomParams {
    pub names: usize,
    pub horizon: usize,
    pub max_depth: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefinementParams {
    pub instances: usize,
    pub horizon: usize,
    pub max_depth: usize,
    pub min_measure: Rational,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExtensionParams {
    pub conditions: usize,
    pub max_depth: usize,
    pub max_weights: usize,
    pub max_res: usize,
    pub max_mean_attempts: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChebyshevParams {
    pub weights: usize,
    pub m_primes: Vec<usize>,
    pub max_res: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NullAvoidanceParams {
    pub cover: ClopenPlaneSet,
    pub cover_measure: Rational,
    pub eps: Rational,
    pub steps: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FullWeightParams {
    pub stems: usize,
    pub max_depth: usize,
    pub max_growth: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CenteredParams {
    pub pairs: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SmzParams {
    pub horizon: usize,
    pub instances: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RapidParams {
    pub thin_limit: usize,
    pub rapidity_instances: usize,
    pub product_instances: usize,
}

/// A base label with per-node overrides.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssignmentSpec {
    pub base: CardinalLabel,
    #[serde(default)]
    pub set: BTreeMap<Node, CardinalLabel>,
}

impl AssignmentSpec {
    pub fn build(&self) -> DiagramAssignment {
        self.set.iter().fold(DiagramAssignment::constant(self.base), |a, (n, l)| a.with(*n, *l))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpectedConstraint {
    pub node: Node,
    pub relation: Relation,
    pub bound: CardinalLabel,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintCase {
    pub ground: AssignmentSpec,
    pub expect: Vec<ExpectedConstraint>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairCase {
    pub ground: AssignmentSpec,
    pub ext: AssignmentSpec,
    pub accepted: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagramParams {
    pub constraints: Vec<ConstraintCase>,
    pub pairs: Vec<PairCase>,
}

impl Fixture {
    pub fn bundled() -> Fixture {
        serde_json::from_str(BUNDLED_FIXTURE).expect("bundled fixture parses")
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed_ms: u128,
    #[serde(skip)]
    pub time_limit_s: Option<u64>,
}

impl CriterionResult {
    /// One human-readable line.
    pub fn line(&self) -> String {
        let limit = self.time_limit_s.map(|s| format!(" limit {s}s")).unwrap_or_default();
        format!(
            "criterion {:>2} {:<22} {} ({} ms{limit}) {}",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.elapsed_ms,
            self.detail
        )
    }
}

type Check = fn(&Fixture, u64) -> Result<String, String>;

pub const CRITERIA: [(u8, &str, Option<u64>, Check); 11] = [
    (1, "set-algebra", Some(5), set_algebra),
    (2, "slalom-bound", Some(5), slalom_bound),
    (3, "refinement", Some(5), refinement),
    (4, "extension", Some(30), extension),
    (5, "chebyshev", Some(60), chebyshev),
    (6, "null-avoidance", Some(10), null_avoidance),
    (7, "full-weight", None, full_weight),
    (8, "centered", None, centered),
    (9, "smz-translation", None, smz_translation),
    (10, "rapid-filter", None, rapid_filter),
    (11, "diagram", None, diagram),
];

pub fn run_criterion(fixture: &Fixture, id: u8) -> Option<CriterionResult> {
    let &(id, name, time_limit_s, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let outcome = check(fixture, crate::poset::mix_seed(fixture.seed, 0xacce, id as u64));
    let elapsed_ms = start.elapsed().as_millis();
    let (mut pass, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(limit) = time_limit_s {
        if elapsed_ms > limit as u128 * 1000 {
            pass = false;
            detail = format!("took {elapsed_ms} ms; {detail}");
        }
    }
    Some(CriterionResult { id, name, pass, detail, elapsed_ms, time_limit_s })
}

pub fn run_all(fixture: &Fixture) -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|c| run_criterion(fixture, c.0)).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// ---- bitmap oracle for depth-8 clopen sets ----

type Bitmap = [u64; 4];

fn bitmap(c: &ClopenSet) -> Bitmap {
    let mut out = [0u64; 4];
    for g in c.generators() {
        assert!(g.len() <= 8);
        let lo = (g.index() << (8 - g.len())) as usize;
        for i in lo..lo + (1 << (8 - g.len())) {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

fn bitmap_measure(b: &Bitmap) -> Rational {
    Rational::new(b.iter().map(|w| w.count_ones() as u64).sum::<u64>(), 256)
}

fn map2(a: &Bitmap, b: &Bitmap, f: impl Fn(u64, u64) -> u64) -> Bitmap {
    [f(a[0], b[0]), f(a[1], b[1]), f(a[2], b[2]), f(a[3], b[3])]
}

fn from_bitmap(b: &Bitmap) -> ClopenSet {
    (0..256u64).filter(|&i| b[(i / 64) as usize] >> (i % 64) & 1 == 1).map(|i| BinaryString::from_index(8, i)).collect()
}

fn set_algebra(f: &Fixture, seed: u64) -> Result<String, String> {
    let p = &f.set_algebra;
    if p.depth > 8 {
        return Err(format!("bitmap oracle covers depth 8, fixture asks for {}", p.depth));
    }
    let mut rng = sample::rng(seed);
    let sets: Vec<ClopenSet> = (0..p.count).map(|_| sample::clopen_set(&mut rng, p.depth)).collect();
    let maps: Vec<Bitmap> = sets.iter().map(bitmap).collect();
    let full = [u64::MAX; 4];
    for i in 0..sets.len() {
        let j = (i * 7 + 3) % sets.len();
        let (a, b) = (&sets[i], &sets[j]);
        let (ma, mb) = (&maps[i], &maps[j]);
        let u = a.union(b);
        let x = a.intersect(b);
        let ctx = || format!("sets {i} and {j}: {a:?} {b:?}");
        ensure(bitmap(&u) == map2(ma, mb, |x, y| x | y), || format!("union differs, {}", ctx()))?;
        ensure(bitmap(&x) == map2(ma, mb, |x, y| x & y), || format!("intersection differs, {}", ctx()))?;
        ensure(bitmap(&a.complement()) == map2(ma, &full, |x, y| !x & y), || format!("complement differs, {}", ctx()))?;
        ensure(bitmap(&a.difference(b)) == map2(ma, mb, |x, y| x & !y), || format!("difference differs, {}", ctx()))?;
        ensure(a.measure() == bitmap_measure(ma), || format!("measure differs, {}", ctx()))?;
        ensure(u.measure() + x.measure() == a.measure() + b.measure(), || format!("additivity fails, {}", ctx()))?;
        ensure(a.is_subset(b) == (map2(ma, mb, |x, y| x & !y) == [0; 4]), || format!("subset differs, {}", ctx()))?;
        ensure(a.is_disjoint(b) == (map2(ma, mb, |x, y| x & y) == [0; 4]), || {
            format!("disjointness differs, {}", ctx())
        })?;
        ensure(from_bitmap(ma) == *a, || format!("canonical form not unique, {}", ctx()))?;
        ensure(a.union(b).complement() == a.complement().intersect(&b.complement()), || {
            format!("De Morgan fails, {}", ctx())
        })?;
    }
    Ok(format!("{} sets, {} pairs", sets.len(), sets.len()))
}

fn name_oracle_heavy(g: &FiniteName, n: usize) -> BTreeSet<u64> {
    let threshold = slalom_threshold(n);
    g.cells(n).iter().filter(|c| bitmap_measure(&bitmap(&c.cells)) > threshold).map(|c| c.label).collect()
}

fn slalom_bound(f: &Fixture, seed: u64) -> Result<String, String> {
    let p = &f.slalom;
    let mut rng = sample::rng(seed);
    let mut largest = (0, 0);
    for i in 0..p.names {
        let g = sample::name(&mut rng, p.horizon, p.max_depth.min(8));
        let s = slalom_extract(&g);
        ensure(s.horizon() == p.horizon, || format!("name {i}: slalom horizon {}", s.horizon()))?;
        for n in 0..p.horizon {
            let size = s.slot(n).len();
            ensure(size < (n + 1) * (n + 1), || format!("name {i}: |S({n})| = {size}"))?;
            ensure(*s.slot(n) == name_oracle_heavy(&g, n), || format!("name {i}: S({n}) differs from oracle"))?;
            if size > largest.1 {
                largest = (n, size);
            }
        }
    }
    Ok(format!("{} names, largest slot |S({})| = {}", p.names, largest.0, largest.1))
}

fn refinement(f: &Fixture, seed: u64) -> Result<String, String> {
    let p = &f.refinement;
    let mut rng = sample::rng(seed);
    let mut min_ratio: Option<Rational> = None;
    for i in 0..p.instances {
        let cond = sample::clopen_set_at_least(&mut rng, p.max_depth.min(8), &p.min_measure);
        let g = sample::name(&mut rng, p.horizon, p.max_depth.min(8));
        let big_n = rng.random_range(0..4);
        let fseq = sample::avoiding_sequence(&mut rng, &g, big_n);
        let r = refine_condition(&cond, &g, &fseq, big_n).map_err(|e| format!("instance {i}: {e}"))?;
        let mq = bitmap_measure(&bitmap(&r.q));
        ensure(mq.is_positive(), || format!("instance {i}: q is null"))?;
        ensure(r.lower_bound.is_positive() && mq >= r.lower_bound, || format!("instance {i}: μ(q) below bound"))?;
        let qmap = bitmap(&r.q);
        ensure(map2(&qmap, &bitmap(&cond), |x, y| x & !y) == [0; 4], || format!("instance {i}: q ⊄ p"))?;
        for (k, &value) in fseq.iter().enumerate().take(p.horizon).skip(r.n) {
            let bv = g.boolean_value(k, value).map_err(|e| e.to_string())?;
            ensure(map2(&qmap, &bitmap(&bv), |x, y| x & y) == [0; 4], || {
                format!("instance {i}: q meets [[g({k}) = f({k})]]")
            })?;
        }
        let ratio = mq / cond.measure();
        if min_ratio.as_ref().is_none_or(|m| &ratio < m) {
            min_ratio = Some(ratio);
        }
    }
    Ok(format!(
        "{} instances, smallest μ(q)/μ(p) = {}",
        p.instances,
        min_ratio.map(|r| r.to_string()).unwrap_or_default()
    ))
}

fn extension(f: &Fixture, seed: u64) -> Result<String, String> {
    let p = &f.extension;
    let mut rng = sample::rng(seed);
    let config = ExtendConfig::default();
    let (mut draws, mut nodes, mut deepest) = (0u64, 0u64, 0);
    for i in 0..p.conditions {
        let cond = sample::condition(&mut rng, p.max_depth, p.max_weights, p.max_res);
        let step_seed = rng.random();
        let (q, report) = extend(&cond, step_seed, &config).map_err(|e| format!("condition {i}: {e}"))?;
        q.validate().map_err(|v| format!("condition {i}: output invalid: {v}"))?;
        ensure(q.extends(&cond), || format!("condition {i}: output does not extend input"))?;
        ensure(one_bit_growth(&cond.stem, &q.stem), || format!("condition {i}: growth is not one bit"))?;
        draws += report.attempts.iter().map(|&a| a as u64).sum::<u64>();
        nodes += report.attempts.len() as u64;
        deepest = deepest.max(report.to_depth);
    }
    let mean = draws as f64 / nodes as f64;
    ensure(mean <= p.max_mean_attempts, || format!("mean draws {mean:.3} above {}", p.max_mean_attempts))?;
    Ok(format!("{} conditions, mean draws {mean:.3}, deepest m' = {deepest}", p.conditions))
}

fn chebyshev(f: &Fixture, seed: u64) -> Result<String, String> {
    let p = &f.chebyshev;
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for i in 0..p.weights {
        let (m1, m2) = (rng.random_range(0..=p.max_res), rng.random_range(0..=p.max_res));
        let phi = sample::weight(&mut rng, m1, m2);
        let total = phi.total();
        let cond = Condition::new(Stem::trivial(), vec![TaggedWeight::new(total.scale_pow2(-1), phi.clone())]);
        let delta = extension_delta(&cond).ok_or("no weights")?;
        let root = BinaryString::EMPTY;
        for &mp in &p.m_primes {
            let width = 1usize << mp;
            let half = total.scale_pow2(-1);
            let mut failing = 0u64;
            let mut values = Vec::with_capacity(1 << width);
            for mask in 0u64..1 << width {
                let e: Vec<bool> = (0..width).map(|r| mask >> r & 1 == 1).collect();
                let y: Rational = BinaryString::all(mp)
                    .map(|t| phi.eval(&t, &BinaryString::from_bits(&[e[t.index() as usize]])))
                    .sum();
                let fails = y <= &half - &delta;
                ensure(otimes_holds(&phi, &root, &root, mp, &delta, &e) != fails, || {
                    format!("weight {i}, m' = {mp}: block test disagrees on labeling {mask:b}")
                })?;
                failing += fails as u64;
                values.push(y);
            }
            let count = Rational::from(values.len() as u64);
            let mean: Rational = values.iter().sum::<Rational>() / &count;
            ensure(mean == half, || format!("weight {i}, m' = {mp}: mean {mean} is not φ/2"))?;
            let var: Rational = values.iter().map(|v| (v - &mean) * (v - &mean)).sum::<Rational>() / &count;
            ensure(var == exact_variance(&phi, &root, &root, mp), || {
                format!("weight {i}, m' = {mp}: variance {var} differs from library")
            })?;
            let fraction = Rational::from(failing) / &count;
            let bound = (Rational::pow2_neg(mp as u32) / (&delta * &delta)).min(Rational::one());
            ensure(fraction <= bound, || format!("weight {i}, m' = {mp}: fraction {fraction} above {bound}"))?;
            ensure(fraction <= &var / (&delta * &delta), || format!("weight {i}, m' = {mp}: above variance bound"))?;
            worst = worst.max(fraction.to_f64());
        }
    }
    Ok(format!("{} weights, worst failing fraction {worst:.4}", p.weights))
}

fn null_avoidance(f: &Fixture, seed: u64) -> Result<String, String> {
    let p = &f.null_avoidance;
    ensure(p.cover.measure() == p.cover_measure, || format!("cover has measure {}", p.cover.measure()))?;
    let schedule = vec![ScheduleEntry { cover: p.cover.clone(), epsilon: p.eps.clone(), at_step: 0 }];
    let run = generic_run(&schedule, p.steps, seed, &ExtendConfig::default()).map_err(|e| e.to_string())?;
    let floor = Rational::one() - &p.eps;
    for t in &run.trace {
        for c in &t.certificates {
            ensure(c.certificate.score_f > floor, || {
                format!("step {}: scoreF = {} not above {floor}", t.step, c.certificate.score_f)
            })?;
        }
    }
    let last = run.trace.last().ok_or("empty trace")?;
    let cert = &last.certificates[0].certificate;
    let (r1, r2) = p.cover.resolution();
    let resolved = run.last.depth() >= r1 && run.last.stem.top().iter().all(|y| y.len() >= r2);
    ensure(resolved, || format!("final depth {} does not resolve the cover", run.last.depth()))?;
    ensure(cert.inside == cert.score_f, || format!("inside {} != scoreF {}", cert.inside, cert.score_f))?;
    Ok(format!("final depth {}, inside = scoreF = {}", run.last.depth(), cert.score_f))
}

fn full_weight(f: &Fixture, seed: u64) -> Result<String, String> {
    let p = &f.full_weight;
    let mut rng = sample::rng(seed);
    let full = WeightFunction::full();
    for i in 0..p.stems {
        let m = rng.random_range(0..=p.max_depth);
        let stem = sample::stem(&mut rng, m, p.max_growth);
        let direct: Rational = BinaryString::all(m)
            .map(|s| {
                let y = stem.get(&s);
                Rational::pow2_neg((s.len() + y.len()) as u32).scale_pow2(y.len() as i64)
            })
            .sum();
        ensure(direct == Rational::one(), || format!("stem {i}: direct sum {direct}"))?;
        let sc = score(&stem, &full);
        ensure(sc == Rational::one(), || format!("stem {i}: score {sc}"))?;
    }
    Ok(format!("{} stems", p.stems))
}

fn centered(f: &Fixture, seed: u64) -> Result<String, String> {
    let p = &f.centered;
    let mut rng = sample::rng(seed);
    let pairs = sample::centered_pairs(&mut rng, p.pairs);
    for (i, (a, b)) in pairs.iter().enumerate() {
        let (ia, ib) = (sigma_centered_index(a), sigma_centered_index(b));
        ensure(ia.is_ok() && ia == ib, || format!("pair {i}: indices differ"))?;
        let r = merge_same_stem(a, b).map_err(|e| format!("pair {i}: {e}"))?;
        r.validate().map_err(|v| format!("pair {i}: merged condition invalid: {v}"))?;
        ensure(r.extends(a) && r.extends(b), || format!("pair {i}: merge does not extend both"))?;
    }
    Ok(format!("{} pairs", pairs.len()))
}

fn smz_translation(f: &Fixture, seed: u64) -> Result<String, String> {
    let p = &f.smz;
    let mut rng = sample::rng(seed);
    let horizon = p.horizon;
    let eps: Vec<Rational> = (0..=(horizon.max(1) - 1).pow(3)).map(|n| Rational::pow2_neg(n as u32)).collect();
    let scales = cover_translate(&eps, horizon).map_err(|e| e.to_string())?;
    for n in 0..horizon {
        let expect = Rational::pow2_neg((n.pow(3) + 1) as u32);
        ensure(scales.delta[n] == expect, || format!("δ_{n} = {} expected {expect}", scales.delta[n]))?;
        ensure(scales.delta_prime[n] < scales.delta[n], || format!("δ′_{n} not below δ_{n}"))?;
        if n % 2 == 1 {
            ensure(scales.delta_prime[n] == scales.delta_prime[n - 1], || format!("δ′_{n} not paired"))?;
        }
    }
    let mut total = 0;
    for inst in 0..p.instances {
        let heavy: Vec<Vec<IntervalSpec>> = (0..horizon)
            .map(|n| {
                let width = &scales.delta_prime[n];
                let cells = width.recip().floor();
                let cells: u64 = cells.try_into().unwrap_or(u64::MAX);
                let want = (n + 1) * (n + 1) - 1;
                let mut picks = BTreeSet::new();
                while picks.len() < want {
                    picks.insert(rng.random_range(0..cells));
                }
                picks.into_iter().map(|k| IntervalSpec::grid(width, k).expect("inside [0,1)")).collect()
            })
            .collect();
        let j =
            flatten_heavy_intervals(&heavy, &scales.delta_prime, &eps).map_err(|e| format!("instance {inst}: {e}"))?;
        let mut index = 0;
        for (n, level) in heavy.iter().enumerate() {
            for _ in level {
                ensure(j[index].length() == scales.delta_prime[n], || format!("instance {inst}: J_{index} length"))?;
                ensure(j[index].length() <= eps[index], || format!("instance {inst}: J_{index} too long"))?;
                index += 1;
            }
        }
        total = j.len();
    }
    Ok(format!("{} instances, {total} intervals each", p.instances))
}

fn rapid_filter(f: &Fixture, seed: u64) -> Result<String, String> {
    let p = &f.rapid;
    let mut rng = sample::rng(seed);
    let limit = p.thin_limit as u64;
    let mut k = 0u64;
    let mut cubes = BTreeSet::new();
    while k * k * k < (limit + 1) * (limit + 1) {
        cubes.insert(k * k * k);
        k += 1;
    }
    let v = thin_set_bound_check(&cubes, p.thin_limit).map_err(|e| e.to_string())?;
    ensure(v.holds, || format!("cubes break the bound at m = {:?}", v.violation))?;

    for i in 0..p.rapidity_instances {
        let len = rng.random_range(2..12);
        let domain = rng.random_range(10..400u64);
        let r = sample::block_choice(&mut rng, domain as usize);
        let (x, fseq) = sample::rapid_witness(&mut rng, len, domain);
        let verdict = rapidity_check(&r, &x, &fseq).map_err(|e| format!("instance {i}: {e}"))?;
        ensure(verdict.holds, || format!("instance {i}: |A ∩ f(n)| > n"))?;
        for (n, &bound) in fseq.iter().enumerate() {
            let direct = x.iter().filter(|&&v| r[v as usize] < bound).count();
            ensure(direct <= n && direct == verdict.counts[n].1, || format!("instance {i}: count at {n}"))?;
        }
    }

    for i in 0..p.product_instances {
        let big_m = rng.random_range(5..40usize);
        let density = rng.random_range(0.05..0.6);
        let a = sample::naturals(&mut rng, (big_m * big_m) as u64, density);
        let x = sample::naturals(&mut rng, big_m as u64, 0.5);
        let n = rng.random_range(0..big_m);
        let mut prev = Rational::one();
        for mm in n..=big_m {
            let cur = product_bound(&a, &x, n, mm);
            ensure(cur <= prev, || format!("instance {i}: product grows at M = {mm}"))?;
            prev = cur;
        }
        let more: BTreeSet<u64> =
            a.iter().copied().chain(sample::naturals(&mut rng, (big_m * big_m) as u64, 0.1)).collect();
        ensure(product_bound(&more, &x, n, big_m) <= product_bound(&a, &x, n, big_m), || {
            format!("instance {i}: product not antitone in A")
        })?;
    }
    Ok(format!(
        "cubes below m = {}: max ratio {}; {} rapidity and {} product instances",
        p.thin_limit, v.max_ratio, p.rapidity_instances, p.product_instances
    ))
}

// Separate edge table for the brute-force oracle, by node position in `Node::ALL`:
// add(N)=0 cov(N)=1 non(N)=2 cof(N)=3 add(M)=4 cov(M)=5 non(M)=6 cof(M)=7 b=8 d=9.
const ORACLE_EDGES: [(usize, usize); 13] =
    [(0, 4), (4, 5), (5, 9), (9, 7), (7, 3), (4, 8), (8, 9), (0, 1), (1, 6), (6, 7), (8, 6), (5, 2), (2, 3)];

fn oracle_accepts(v: &[u8; 12]) -> bool {
    ORACLE_EDGES.iter().all(|&(a, b)| v[a] <= v[b]) && v[4] == v[8].min(v[5]) && v[7] == v[9].max(v[6])
}

fn diagram(f: &Fixture, _seed: u64) -> Result<String, String> {
    let labels = [CardinalLabel::ALEPH_1, CardinalLabel::ALEPH_2];
    let mut accepted = 0;
    for bits in 0u32..1 << 12 {
        let v: [u8; 12] = std::array::from_fn(|i| (bits >> i & 1) as u8);
        let a = Node::ALL
            .iter()
            .enumerate()
            .fold(DiagramAssignment::constant(labels[0]), |a, (i, n)| a.with(*n, labels[v[i] as usize]));
        let ok = check_assignment(&a).is_empty();
        ensure(ok == oracle_accepts(&v), || format!("assignment {bits:012b}: checker says {ok}"))?;
        accepted += ok as usize;
    }
    for (i, case) in f.diagram.constraints.iter().enumerate() {
        let cs = random_extension_constraints(&case.ground.build()).map_err(|e| format!("constraint case {i}: {e}"))?;
        for e in &case.expect {
            ensure(cs.iter().any(|c| c.node == e.node && c.relation == e.relation && c.bound == e.bound), || {
                format!("constraint case {i}: missing {} {:?} {}", e.node, e.relation, e.bound)
            })?;
        }
    }
    for (i, case) in f.diagram.pairs.iter().enumerate() {
        let v = check_extension_pair(&case.ground.build(), &case.ext.build());
        ensure(v.accepted() == case.accepted, || format!("pair case {i}: accepted = {}", v.accepted()))?;
    }
    Ok(format!(
        "{accepted}/4096 two-label assignments accepted; {} constraint and {} pair cases",
        f.diagram.constraints.len(),
        f.diagram.pairs.len()
    ))
}
