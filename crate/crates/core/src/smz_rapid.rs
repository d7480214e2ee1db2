//! Finite pieces of two constructions over one random real: translating a
//! strong-measure-zero cover through small rational intervals, and density
//! bounds for the blocks `[m², (m+1)²)` behind rapid filters.
//!
//! Everything lives in `[0,1)` with rational endpoints and finite horizons;
//! limits are replaced by exact partial values.

use std::collections::BTreeSet;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic_measure::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SmzError {
    #[error("need values up to index {needed}, only {got} given")]
    HorizonTooShort { needed: usize, got: usize },
    #[error("ε_{index} is not positive")]
    NonPositive { index: usize },
    #[error("interval [{left}, {right}) is not inside [0,1) or is empty")]
    InvalidInterval { left: Rational, right: Rational },
    #[error("level {n} has {count} intervals, must be below {}", (n + 1) * (n + 1))]
    TooManyIntervals { n: usize, count: usize },
    #[error("interval {index} of level {n} does not have length δ′_{n}")]
    WrongLength { n: usize, index: usize },
    #[error("J_{index} has length {length} > ε_{index} = {eps}")]
    LengthBoundViolated { index: usize, length: Rational, eps: Rational },
    #[error("precondition fails at n = {n}")]
    PreconditionFailed { n: usize },
    #[error("r({n}) = {value} is outside [n², (n+1)²)")]
    OutOfBlock { n: usize, value: u64 },
    #[error("f is not increasing at {n}")]
    NotIncreasing { n: usize },
    #[error("{x} is outside the domain of r")]
    OutOfDomain { x: u64 },
}

/// A half-open interval `[left, right) ⊆ [0,1)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntervalSpec {
    left: Rational,
    right: Rational,
}

impl IntervalSpec {
    pub fn new(left: Rational, right: Rational) -> Result<Self, SmzError> {
        if left.is_negative() || left >= right || right > Rational::one() {
            return Err(SmzError::InvalidInterval { left, right });
        }
        Ok(IntervalSpec { left, right })
    }

    /// The `k`-th cell `[kw, (k+1)w)` of the grid of width `w`.
    pub fn grid(width: &Rational, k: u64) -> Result<Self, SmzError> {
        IntervalSpec::new(width * k, width * (k + 1))
    }

    pub fn left(&self) -> &Rational {
        &self.left
    }

    pub fn right(&self) -> &Rational {
        &self.right
    }

    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }
}

impl Serialize for IntervalSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (&self.left, &self.right).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntervalSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (left, right) = <(Rational, Rational)>::deserialize(deserializer)?;
        IntervalSpec::new(left, right).map_err(serde::de::Error::custom)
    }
}

/// The two shrinking sequences used to translate a cover.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverScales {
    pub delta: Vec<Rational>,
    pub delta_prime: Vec<Rational>,
}

/// For `n < horizon`: `δ_n = ½·min{ε_k : k ≤ n³}`, and `δ′_{2k} = δ′_{2k+1}`
/// is the largest power of two strictly below `δ_{2k}` and `δ_{2k+1}`.
///
/// `δ` is non-increasing because the minimum runs over a growing range;
/// `δ′` inherits that and sits strictly below `δ`.
pub fn cover_translate(eps: &[Rational], horizon: usize) -> Result<CoverScales, SmzError> {
    if horizon == 0 {
        return Ok(CoverScales { delta: Vec::new(), delta_prime: Vec::new() });
    }
    let last = (horizon - 1).pow(3);
    if eps.len() <= last {
        return Err(SmzError::HorizonTooShort { needed: last, got: eps.len() });
    }
    if let Some(index) = eps[..=last].iter().position(|e| !e.is_positive()) {
        return Err(SmzError::NonPositive { index });
    }
    let mut delta = Vec::with_capacity(horizon);
    let mut running = eps[0].clone();
    let mut seen = 0;
    for n in 0..horizon {
        let upto = n.pow(3);
        while seen < upto {
            seen += 1;
            if eps[seen] < running {
                running = eps[seen].clone();
            }
        }
        delta.push(running.scale_pow2(-1));
    }
    let delta_prime = (0..horizon)
        .map(|n| {
            let pair = n & !1;
            let low = if pair + 1 < horizon { &delta[pair + 1] } else { &delta[pair] };
            low.clone().min(delta[pair].clone()).dyadic_strictly_below()
        })
        .collect();
    Ok(CoverScales { delta, delta_prime })
}

/// Concatenate the heavy intervals level by level, in the order given, and
/// check that the `j`-th interval is no longer than `ε_j`.
pub fn flatten_heavy_intervals(
    heavy: &[Vec<IntervalSpec>],
    delta_prime: &[Rational],
    eps: &[Rational],
) -> Result<Vec<IntervalSpec>, SmzError> {
    if delta_prime.len() < heavy.len() {
        return Err(SmzError::HorizonTooShort { needed: heavy.len(), got: delta_prime.len() });
    }
    let mut out = Vec::new();
    for (n, level) in heavy.iter().enumerate() {
        if level.len() >= (n + 1) * (n + 1) {
            return Err(SmzError::TooManyIntervals { n, count: level.len() });
        }
        for (index, interval) in level.iter().enumerate() {
            if interval.length() != delta_prime[n] {
                return Err(SmzError::WrongLength { n, index });
            }
        }
        out.extend(level.iter().cloned());
    }
    if eps.len() < out.len() {
        return Err(SmzError::HorizonTooShort { needed: out.len(), got: eps.len() });
    }
    for (index, (j, e)) in out.iter().zip(eps).enumerate() {
        let length = j.length();
        if &length > e {
            return Err(SmzError::LengthBoundViolated { index, length, eps: e.clone() });
        }
    }
    Ok(out)
}

/// `value(m) = |A ∩ [m², (m+1)²)| / (2m+1)` for `m < M`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DensityProfile {
    values: Vec<Rational>,
}

impl DensityProfile {
    pub fn from_values(values: Vec<Rational>) -> Self {
        DensityProfile { values }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `∏_{m ∈ X, n ≤ m < len} (1 − value(m))`.
    pub fn partial_product(&self, x: &BTreeSet<u64>, n: usize) -> Rational {
        x.range(n as u64..self.values.len() as u64)
            .map(|&m| Rational::one() - &self.values[m as usize])
            .fold(Rational::one(), |acc, f| acc * f)
    }
}

impl Serialize for DensityProfile {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.values.serialize(serializer)
    }
}

fn block_count(a: &BTreeSet<u64>, m: u64) -> u64 {
    a.range(m * m..(m + 1) * (m + 1)).count() as u64
}

pub fn density_profile(a: &BTreeSet<u64>, big_m: usize) -> DensityProfile {
    let values = (0..big_m as u64).map(|m| Rational::new(block_count(a, m), 2 * m + 1)).collect();
    DensityProfile { values }
}

/// `⌊x^{1/3}⌋` for integers.
fn icbrt(x: u64) -> u64 {
    let mut r = (x as f64).cbrt() as u64;
    while (r as u128).pow(3) > x as u128 {
        r -= 1;
    }
    while ((r + 1) as u128).pow(3) <= x as u128 {
        r += 1;
    }
    r
}

/// `(⌊(m+1)^{2/3}⌋ + 1) / (2m+1)`.
pub fn thin_bound(m: u64) -> Rational {
    Rational::new(icbrt((m + 1) * (m + 1)) + 1, 2 * m + 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThinVerdict {
    pub holds: bool,
    /// First `m` with `value(m)` above the bound.
    pub violation: Option<usize>,
    pub max_value: Rational,
    /// Largest `value(m) / bound(m)`.
    pub max_ratio: Rational,
}

/// For a set with `|A ∩ [0,n³)| ≤ n`, compare each block density with
/// [`thin_bound`] for `m < M`.
pub fn thin_set_bound_check(a: &BTreeSet<u64>, big_m: usize) -> Result<ThinVerdict, SmzError> {
    // Blocks below M live in [0, M²); n with n³ ≥ M² covers them.
    let reach = (big_m as u64) * (big_m as u64);
    let mut n = 0u64;
    loop {
        let cube = n.pow(3);
        if a.range(..cube).count() as u64 > n {
            return Err(SmzError::PreconditionFailed { n: n as usize });
        }
        if cube >= reach {
            break;
        }
        n += 1;
    }
    let profile = density_profile(a, big_m);
    let mut verdict =
        ThinVerdict { holds: true, violation: None, max_value: Rational::zero(), max_ratio: Rational::zero() };
    for (m, v) in profile.values().iter().enumerate() {
        let bound = thin_bound(m as u64);
        if v > &bound && verdict.violation.is_none() {
            verdict.holds = false;
            verdict.violation = Some(m);
        }
        let ratio = v / &bound;
        if ratio > verdict.max_ratio {
            verdict.max_ratio = ratio;
        }
        if v > &verdict.max_value {
            verdict.max_value = v.clone();
        }
    }
    Ok(verdict)
}

/// `∏_{m ∈ X, n ≤ m < M} (1 − |A ∩ [m², (m+1)²)|/(2m+1))`.
pub fn product_bound(a: &BTreeSet<u64>, x: &BTreeSet<u64>, n: usize, big_m: usize) -> Rational {
    density_profile(a, big_m).partial_product(x, n)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RapidityVerdict {
    pub holds: bool,
    /// `(|X ∩ f(n)|, |A ∩ f(n)|)` for each `n`.
    pub counts: Vec<(usize, usize)>,
}

/// With `A = {r(x) : x ∈ X}`, check `|A ∩ f(n)| ≤ n` given `|X ∩ f(n)| ≤ n`.
///
/// `r(n) ∈ [n², (n+1)²)` makes `r` increasing, so `r(x) < f(n)` forces
/// `x < f(n)` and the first count bounds the second.
pub fn rapidity_check(r: &[u64], x: &BTreeSet<u64>, f: &[u64]) -> Result<RapidityVerdict, SmzError> {
    for (n, &v) in r.iter().enumerate() {
        let n64 = n as u64;
        if v < n64 * n64 || v >= (n64 + 1) * (n64 + 1) {
            return Err(SmzError::OutOfBlock { n, value: v });
        }
    }
    if let Some(n) = f.windows(2).position(|w| w[0] >= w[1]) {
        return Err(SmzError::NotIncreasing { n: n + 1 });
    }
    if let Some(&bad) = x.iter().find(|&&v| v as usize >= r.len()) {
        return Err(SmzError::OutOfDomain { x: bad });
    }
    let a: BTreeSet<u64> = x.iter().map(|&v| r[v as usize]).collect();
    let mut counts = Vec::with_capacity(f.len());
    for (n, &bound) in f.iter().enumerate() {
        let in_x = x.range(..bound).count();
        if in_x > n {
            return Err(SmzError::PreconditionFailed { n });
        }
        counts.push((in_x, a.range(..bound).count()));
    }
    let holds = counts.iter().enumerate().all(|(n, &(_, in_a))| in_a <= n);
    Ok(RapidityVerdict { holds, counts })
}
