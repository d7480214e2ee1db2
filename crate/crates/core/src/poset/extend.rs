use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::condition::{Condition, Stem};
use super::weight::WeightFunction;
use super::{mix_seed, PosetError};
use crate::dyadic_measure::{BinaryString, Rational, MAX_LEN};

/// Knobs for [`extend`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtendConfig {
    /// Random draws per `s ∈ 2^m` before falling back to enumeration.
    pub retry_cap: u32,
    /// Largest number of one-bit labelings enumerated per `s`.
    pub exhaustive_cap: u64,
    /// Refuse to build stems deeper than this.
    pub max_depth: usize,
}

impl Default for ExtendConfig {
    fn default() -> Self {
        ExtendConfig { retry_cap: 64, exhaustive_cap: 1 << 20, max_depth: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtendReport {
    pub seed: u64,
    pub from_depth: usize,
    pub to_depth: usize,
    /// Allowed per-node shortfall; `None` when there are no weights.
    pub delta: Option<Rational>,
    /// Random draws used for each `s ∈ 2^m`, in lexicographic order.
    pub attempts: Vec<u32>,
    /// Number of `s` settled by enumeration after the random draws ran out.
    pub exhaustive: usize,
}

impl ExtendReport {
    pub fn mean_attempts(&self) -> f64 {
        if self.attempts.is_empty() {
            return 0.0;
        }
        self.attempts.iter().map(|&a| a as f64).sum::<f64>() / self.attempts.len() as f64
    }
}

/// `min_i(score_i − ε_i) / (2·Σ_{s∈2^m} 2^{1+|h(s)|})`, or `None` without weights.
pub fn extension_delta(p: &Condition) -> Option<Rational> {
    let slack = p.min_slack()?;
    let total: BigInt = p.stem.top().iter().map(|y| BigInt::from(1) << (y.len() + 1)).sum();
    Some(slack / Rational::integer(total * 2))
}

/// Where `φ(t, y⌢i)` stops depending on `t` beyond `s`: blocks of strings of
/// length `L = max(m, min(m', M1))` extending `s`.
fn block_len(phi: &WeightFunction, m: usize, m_prime: usize) -> usize {
    m.max(m_prime.min(phi.resolution().0))
}

/// Exact variance of `Y = Σ_{t ⊇ s, |t| = m'} φ(t, y⌢e(t))` when the bits
/// `e(t)` are independent fair coins.
pub fn exact_variance(phi: &WeightFunction, s: &BinaryString, y: &BinaryString, m_prime: usize) -> Rational {
    let (y0, y1) = (y.push(false), y.push(true));
    let l = block_len(phi, s.len(), m_prime);
    let sum: Rational = s
        .extensions(l)
        .map(|w| {
            let d = phi.eval(&w, &y0) - phi.eval(&w, &y1);
            &d * &d
        })
        .sum();
    sum.scale_pow2(-2 - (m_prime - l) as i64)
}

/// `Y > φ(s,y)/2 − δ` with `Y` as in [`exact_variance`], for an explicit
/// labeling `e` of the `2^{m'−|s|}` extensions of `s` (bit `r` labels `s⌢r`).
pub fn otimes_holds(
    phi: &WeightFunction,
    s: &BinaryString,
    y: &BinaryString,
    m_prime: usize,
    delta: &Rational,
    e: &[bool],
) -> bool {
    let test = LocalTest::build(phi, s, y, m_prime, delta);
    let bits = pack(e);
    test.holds(&bits)
}

// The inequality Σ_w count_w · coef_w > target over integers, where count_w is
// the number of ones among the labels of block w.
struct LocalTest {
    coefs: Vec<BigInt>,
    target: BigInt,
    block_bits: usize,
}

impl LocalTest {
    fn build(phi: &WeightFunction, s: &BinaryString, y: &BinaryString, m_prime: usize, delta: &Rational) -> Self {
        let (y0, y1) = (y.push(false), y.push(true));
        let l = block_len(phi, s.len(), m_prime);
        let shift = -((m_prime - l) as i64);
        let mut target = phi.eval(s, y).scale_pow2(-1) - delta;
        let mut coefs = Vec::with_capacity(1 << (l - s.len()));
        for w in s.extensions(l) {
            let a = phi.eval(&w, &y0);
            let b = phi.eval(&w, &y1);
            coefs.push((b - &a).scale_pow2(shift));
            target -= &a;
        }
        let denom = coefs.iter().fold(target.denom().clone(), |acc, c| acc.lcm(c.denom()));
        let scale = |r: &Rational| r.numer() * (&denom / r.denom());
        LocalTest { target: scale(&target), coefs: coefs.iter().map(scale).collect(), block_bits: m_prime - l }
    }

    fn holds(&self, bits: &[u64]) -> bool {
        let block = 1usize << self.block_bits;
        let mut acc = BigInt::from(0);
        for (w, c) in self.coefs.iter().enumerate() {
            let ones = count_ones(bits, w * block, block);
            if ones > 0 {
                acc += c * BigInt::from(ones);
            }
        }
        acc > self.target
    }
}

fn pack(e: &[bool]) -> Vec<u64> {
    let mut out = vec![0u64; e.len().div_ceil(64)];
    for (i, &b) in e.iter().enumerate() {
        if b {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

fn count_ones(bits: &[u64], start: usize, len: usize) -> u64 {
    let end = start + len;
    let mut total = 0u64;
    let mut i = start;
    while i < end {
        let word = i / 64;
        let lo = i % 64;
        let hi = (end - word * 64).min(64);
        let mask = if hi - lo == 64 { u64::MAX } else { ((1u64 << (hi - lo)) - 1) << lo };
        total += (bits[word] & mask).count_ones() as u64;
        i = word * 64 + hi;
    }
    total
}

/// Labels chosen below one node, draws used, and whether enumeration was needed.
type NodeOutcome = (Vec<bool>, u32, bool);

/// One extension step `p ↦ q ≤ p` with `m(q) > m(p)`.
///
/// Every `s ∈ 2^m` gets one fresh bit per extension of length `m'`; the new
/// stem is `h'(t) = h(t↾m)⌢e(t)`. `m'` is the least depth at which, for
/// every weight and every `s`, twice the number of weights times the
/// variance of the local mass is below `δ²`. A random labeling then meets
/// all local targets with probability above 1/2, so few draws are needed.
/// Randomness is derived from `seed` and `s`, so results do not depend on
/// the thread schedule.
pub fn extend(p: &Condition, seed: u64, config: &ExtendConfig) -> Result<(Condition, ExtendReport), PosetError> {
    p.validate().map_err(PosetError::InvalidCondition)?;
    let m = p.depth();
    if let Some(y) = p.stem.top().iter().find(|y| y.len() >= MAX_LEN) {
        return Err(PosetError::StringTooLong(*y));
    }

    let Some(delta) = extension_delta(p) else {
        if m + 1 > config.max_depth {
            return Err(PosetError::DepthLimit { required: m + 1, limit: config.max_depth });
        }
        let labels = vec![vec![false; 2]; 1 << m];
        let q = Condition::new(grow_stem(&p.stem, 1, &labels), Vec::new());
        let report = ExtendReport {
            seed,
            from_depth: m,
            to_depth: m + 1,
            delta: None,
            attempts: vec![1; 1 << m],
            exhaustive: 0,
        };
        return Ok((q, report));
    };

    // Distinct local problems: φ only sees s up to its x-resolution.
    let mut keys: HashMap<(usize, BinaryString, BinaryString), BinaryString> = HashMap::new();
    for (i, y) in p.stem.top().iter().enumerate() {
        let s = BinaryString::from_index(m, i as u64);
        for (k, w) in p.weights.iter().enumerate() {
            if y.len() >= w.phi.resolution().1 {
                // Both children carry half the mass whatever e is: Y = φ(s,y)/2.
                continue;
            }
            let cut = m.min(w.phi.resolution().0);
            keys.entry((k, s.prefix(cut), *y)).or_insert(s);
        }
    }

    let n = p.weights.len();
    let delta_sq = &delta * &delta;
    let two_n = Rational::from(2 * n as u64);
    let mut m_prime = m + 1;
    loop {
        let ok =
            keys.iter().all(|((k, _, y), s)| &two_n * &exact_variance(&p.weights[*k].phi, s, y, m_prime) < delta_sq);
        if ok {
            break;
        }
        m_prime += 1;
        if m_prime >= 62 {
            break;
        }
    }
    if m_prime > config.max_depth {
        return Err(PosetError::DepthLimit { required: m_prime, limit: config.max_depth });
    }
    log::debug!("extend: m = {m}, m' = {m_prime}, delta = {delta}");

    let tests: HashMap<(usize, BinaryString, BinaryString), LocalTest> = keys
        .par_iter()
        .map(|(key, s)| (*key, LocalTest::build(&p.weights[key.0].phi, s, &key.2, m_prime, &delta)))
        .collect();

    let d = m_prime - m;
    let width = 1usize << d;
    let enumerable = d <= 6 && (1u128 << width) <= config.exhaustive_cap as u128;
    let outcomes: Vec<Result<NodeOutcome, PosetError>> = (0..1u64 << m)
        .into_par_iter()
        .map(|i| {
            let s = BinaryString::from_index(m, i);
            let y = p.stem.top()[i as usize];
            let local: Vec<(usize, &LocalTest)> = (0..n)
                .filter_map(|k| {
                    let cut = m.min(p.weights[k].phi.resolution().0);
                    tests.get(&(k, s.prefix(cut), y)).map(|t| (k, t))
                })
                .collect();
            let failing = |bits: &[u64]| local.iter().find(|(_, t)| !t.holds(bits)).map(|(k, _)| *k);

            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, m as u64, i));
            let mut bits = vec![0u64; width.div_ceil(64)];
            let mut last_fail = 0;
            for attempt in 1..=config.retry_cap {
                for word in bits.iter_mut() {
                    *word = rng.next_u64();
                }
                if width < 64 {
                    bits[0] &= (1u64 << width) - 1;
                }
                match failing(&bits) {
                    None => return Ok((unpack(&bits, width), attempt, false)),
                    Some(k) => last_fail = k,
                }
            }
            if enumerable {
                for mask in 0..1u64 << width {
                    let bits = [mask];
                    if failing(&bits).is_none() {
                        return Ok((unpack(&bits, width), config.retry_cap, true));
                    }
                }
            }
            Err(PosetError::SearchExhausted { s, phi: last_fail })
        })
        .collect();

    let mut labels = Vec::with_capacity(1 << m);
    let mut attempts = Vec::with_capacity(1 << m);
    let mut exhaustive = 0;
    for outcome in outcomes {
        let (e, a, ex) = outcome?;
        labels.push(e);
        attempts.push(a);
        exhaustive += ex as usize;
    }

    let q = Condition::new(grow_stem(&p.stem, d, &labels), p.weights.clone());
    q.validate().map_err(PosetError::PostCheckFailed)?;
    let report = ExtendReport { seed, from_depth: m, to_depth: m_prime, delta: Some(delta), attempts, exhaustive };
    Ok((q, report))
}

/// `h'` agrees with `h` below `m` and every `t` at the top adds exactly one
/// bit to `h(t↾m)`; levels in between copy `h(t↾m)`.
pub fn one_bit_growth(p: &Stem, q: &Stem) -> bool {
    let (m, mq) = (p.depth(), q.depth());
    if mq <= m || q.restrict(m) != *p {
        return false;
    }
    (m + 1..=mq).all(|j| {
        q.level(j).iter().enumerate().all(|(i, y)| {
            let base = p.top()[i >> (j - m)];
            if j < mq {
                *y == base
            } else {
                y.len() == base.len() + 1 && base.is_prefix_of(y)
            }
        })
    })
}

fn unpack(bits: &[u64], width: usize) -> Vec<bool> {
    (0..width).map(|i| bits[i / 64] >> (i % 64) & 1 == 1).collect()
}

/// Levels `m+1 .. m+d−1` copy `h(s)`; level `m+d` appends the label bit.
fn grow_stem(stem: &Stem, d: usize, labels: &[Vec<bool>]) -> Stem {
    let m = stem.depth();
    let mut levels: Vec<Vec<BinaryString>> = (0..=m).map(|j| stem.level(j).to_vec()).collect();
    let top = stem.top();
    for j in 1..d {
        levels.push((0..1usize << (m + j)).map(|i| top[i >> j]).collect());
    }
    let last: Vec<BinaryString> =
        top.par_iter().zip(labels.par_iter()).flat_map_iter(|(y, e)| e.iter().map(move |&b| y.push(b))).collect();
    levels.push(last);
    Stem::from_levels_unchecked(levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic_measure::{bs, plane, rat};
    use crate::poset::{phi_from_clopen, TaggedWeight};

    fn direct_y(phi: &WeightFunction, s: &BinaryString, y: &BinaryString, m_prime: usize, e: &[bool]) -> Rational {
        s.extensions(m_prime).zip(e).map(|(t, &b)| phi.eval(&t, &y.push(b))).sum()
    }

    #[test]
    fn empty_u_grows_by_one() {
        let (q, report) = extend(&Condition::trivial(), 3, &ExtendConfig::default()).unwrap();
        assert_eq!(q.depth(), 1);
        assert_eq!(report.to_depth, 1);
        assert_eq!(q.stem.top(), &[bs("0"), bs("0")]);
        let (r, _) = extend(&q, 4, &ExtendConfig::default()).unwrap();
        assert_eq!(r.stem.top().len(), 4);
        assert!(r.validate().is_ok());
    }

    #[test]
    fn full_weight_accepts_first_draw() {
        let p = Condition::trivial().attach_weight(rat(1, 2), WeightFunction::full()).unwrap();
        let (q, report) = extend(&p, 11, &ExtendConfig::default()).unwrap();
        assert!(q.validate().is_ok());
        assert!(q.extends(&p));
        assert!(report.attempts.iter().all(|&a| a == 1));
    }

    #[test]
    fn block_test_matches_direct_sum() {
        let phi = phi_from_clopen(&plane(&[("00", "0"), ("01", "1"), ("11", "01")])).unwrap();
        let delta = rat(1, 64);
        for (s, y) in [("", ""), ("0", ""), ("1", "0"), ("0", "1")] {
            let (s, y) = (bs(s), bs(y));
            for m_prime in s.len() + 1..=s.len() + 3 {
                let width = 1 << (m_prime - s.len());
                for mask in 0u32..1 << width {
                    let e: Vec<bool> = (0..width).map(|i| mask >> i & 1 == 1).collect();
                    let expect = direct_y(&phi, &s, &y, m_prime, &e) > phi.eval(&s, &y) / rat(2, 1) - &delta;
                    assert_eq!(otimes_holds(&phi, &s, &y, m_prime, &delta, &e), expect);
                }
            }
        }
    }

    #[test]
    fn variance_matches_enumeration() {
        let phi = phi_from_clopen(&plane(&[("00", "0"), ("01", "1"), ("10", "00")])).unwrap();
        let (s, y) = (bs("0"), bs(""));
        for m_prime in 2..=4 {
            let width = 1usize << (m_prime - 1);
            let values: Vec<Rational> = (0u32..1 << width)
                .map(|mask| {
                    let e: Vec<bool> = (0..width).map(|i| mask >> i & 1 == 1).collect();
                    direct_y(&phi, &s, &y, m_prime, &e)
                })
                .collect();
            let count = Rational::from(values.len() as u64);
            let mean: Rational = values.iter().sum::<Rational>() / &count;
            let var: Rational = values.iter().map(|v| (v - &mean) * (v - &mean)).sum::<Rational>() / &count;
            assert_eq!(var, exact_variance(&phi, &s, &y, m_prime), "m' = {m_prime}");
            assert_eq!(mean, phi.eval(&s, &y) / rat(2, 1));
        }
    }

    #[test]
    fn same_seed_same_result() {
        let phi = phi_from_clopen(&plane(&[("0", "0"), ("1", "11")])).unwrap();
        let p = Condition::trivial().attach_weight(rat(1, 4), phi).unwrap();
        let a = extend(&p, 42, &ExtendConfig::default()).unwrap();
        let b = extend(&p, 42, &ExtendConfig::default()).unwrap();
        assert_eq!(a.0, b.0);
        assert!(a.0.validate().is_ok());
    }

    #[test]
    fn depth_guard() {
        let phi = phi_from_clopen(&plane(&[("0", "0"), ("1", "11")])).unwrap();
        let p = Condition::new(Stem::trivial(), vec![TaggedWeight::new(rat(1, 4), phi)]);
        let config = ExtendConfig { max_depth: 1, ..ExtendConfig::default() };
        assert!(matches!(extend(&p, 0, &config), Err(PosetError::DepthLimit { .. })));
    }
}
