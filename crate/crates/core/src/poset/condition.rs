use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::weight::{phi_from_clopen, TaggedWeight, WeightFunction};
use super::PosetError;
use crate::dyadic_measure::{BinaryString, ClopenPlaneSet, Rational};

/// A monotone map `h: 2^{≤m} → 2^{<ω}` stored level by level.
///
/// Level `j` holds `h(s)` for every `s` of length `j`, indexed by the
/// lexicographic index of `s`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Stem {
    levels: Vec<Vec<BinaryString>>,
}

impl Stem {
    /// The depth-0 stem `h(∅) = ∅`.
    pub fn trivial() -> Self {
        Stem { levels: vec![vec![BinaryString::EMPTY]] }
    }

    /// Build from explicit levels; level `j` must have `2^j` entries.
    /// Monotonicity is not checked here, see [`Condition::validate`].
    pub fn from_levels(levels: Vec<Vec<BinaryString>>) -> Result<Self, PosetError> {
        if levels.is_empty() {
            return Err(PosetError::MalformedStem("no levels".into()));
        }
        for (j, level) in levels.iter().enumerate() {
            if j >= 40 || level.len() != 1usize << j {
                return Err(PosetError::MalformedStem(format!("level {j} has {} entries", level.len())));
            }
        }
        Ok(Stem { levels })
    }

    /// Build from `(s, h(s))` pairs covering every `s` of length at most `m`.
    pub fn from_pairs<I>(m: usize, pairs: I) -> Result<Self, PosetError>
    where
        I: IntoIterator<Item = (BinaryString, BinaryString)>,
    {
        if m >= 40 {
            return Err(PosetError::MalformedStem(format!("depth {m} too large")));
        }
        let mut levels: Vec<Vec<Option<BinaryString>>> = (0..=m).map(|j| vec![None; 1 << j]).collect();
        for (s, t) in pairs {
            if s.len() > m {
                return Err(PosetError::MalformedStem(format!("{s} is deeper than {m}")));
            }
            let slot = &mut levels[s.len()][s.index() as usize];
            if slot.replace(t).is_some() {
                return Err(PosetError::MalformedStem(format!("{s} given twice")));
            }
        }
        let levels = levels
            .into_iter()
            .enumerate()
            .map(|(j, level)| {
                level
                    .into_iter()
                    .enumerate()
                    .map(|(i, t)| {
                        t.ok_or_else(|| {
                            PosetError::MalformedStem(format!("missing {}", BinaryString::from_index(j, i as u64)))
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Stem { levels })
    }

    /// `m(p)`: the length of the longest strings in the domain.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// `h(s)`; panics if `|s|` exceeds the depth.
    pub fn get(&self, s: &BinaryString) -> &BinaryString {
        &self.levels[s.len()][s.index() as usize]
    }

    pub fn level(&self, j: usize) -> &[BinaryString] {
        &self.levels[j]
    }

    /// The top level, `h` restricted to `2^m`.
    pub fn top(&self) -> &[BinaryString] {
        &self.levels[self.depth()]
    }

    /// `h` restricted to `2^{≤j}`.
    pub fn restrict(&self, j: usize) -> Stem {
        Stem { levels: self.levels[..=j.min(self.depth())].to_vec() }
    }

    /// All `(s, h(s))` in shortlex order of `s`.
    pub fn pairs(&self) -> impl Iterator<Item = (BinaryString, &BinaryString)> + '_ {
        self.levels.iter().enumerate().flat_map(|(j, level)| {
            level.iter().enumerate().map(move |(i, t)| (BinaryString::from_index(j, i as u64), t))
        })
    }

    /// First pair `(s, s⌢i)` with `h(s)` not a prefix of `h(s⌢i)`.
    pub fn monotonicity_witness(&self) -> Option<(BinaryString, BinaryString)> {
        for j in 1..self.levels.len() {
            for (i, t) in self.levels[j].iter().enumerate() {
                let parent = &self.levels[j - 1][i >> 1];
                if !parent.is_prefix_of(t) {
                    let child = BinaryString::from_index(j, i as u64);
                    return Some((child.parent().expect("nonempty"), child));
                }
            }
        }
        None
    }

    pub(crate) fn from_levels_unchecked(levels: Vec<Vec<BinaryString>>) -> Self {
        Stem { levels }
    }
}

impl fmt::Debug for Stem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.pairs().map(|(s, t)| (s.to_string(), t.to_string()))).finish()
    }
}

/// `Σ_{s∈2^m} 2^{|h(s)|} φ(s, h(s))`.
///
/// Stems much deeper than the resolution of `φ` are common, so the sum is
/// grouped by the part of `(s, h(s))` that `φ` can actually see.
pub fn score(stem: &Stem, phi: &WeightFunction) -> Rational {
    let m = stem.depth();
    let (m1, m2) = phi.resolution();
    let a = m.min(m1);
    let mut groups: HashMap<(u64, usize, u64), u64> = HashMap::new();
    for (i, y) in stem.top().iter().enumerate() {
        let b = y.len().min(m2);
        *groups.entry(((i as u64) >> (m - a), b, y.prefix(b).index())).or_default() += 1;
    }
    groups
        .into_iter()
        .map(|((x, b, y), count)| &phi.block(a, b, x, y).scale_pow2(b as i64 - (m - a) as i64) * count)
        .sum()
}

/// The reason a condition fails to be an element of the poset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
#[serde(tag = "clause", rename_all = "snake_case")]
pub enum Violation {
    #[error("weight {index} has ε = {epsilon} outside (0,1)")]
    EpsilonRange { index: usize, epsilon: Rational },
    #[error("h({parent}) = {parent_value} is not a prefix of h({child}) = {child_value}")]
    NotMonotone { parent: BinaryString, child: BinaryString, parent_value: BinaryString, child_value: BinaryString },
    #[error("weight {index} scores {score}, not above ε = {epsilon}")]
    ScoreTooLow { index: usize, score: Rational, epsilon: Rational },
}

/// A condition `⟨h, u⟩`: a stem together with finitely many tagged weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub stem: Stem,
    pub weights: Vec<TaggedWeight>,
}

impl Condition {
    pub fn new(stem: Stem, weights: Vec<TaggedWeight>) -> Self {
        Condition { stem, weights }
    }

    /// `⟨{∅ ↦ ∅}, ∅⟩`, the weakest condition.
    pub fn trivial() -> Self {
        Condition { stem: Stem::trivial(), weights: Vec::new() }
    }

    pub fn depth(&self) -> usize {
        self.stem.depth()
    }

    pub fn scores(&self) -> Vec<Rational> {
        self.weights.iter().map(|w| score(&self.stem, &w.phi)).collect()
    }

    /// `min_i (score_i − ε_i)`, or `None` if there are no weights.
    pub fn min_slack(&self) -> Option<Rational> {
        self.weights.iter().map(|w| score(&self.stem, &w.phi) - &w.epsilon).min()
    }

    /// Check membership in the poset and report the first clause that fails:
    /// tag range, then monotonicity of `h`, then the score inequalities.
    pub fn validate(&self) -> Result<(), Violation> {
        for (index, w) in self.weights.iter().enumerate() {
            if !w.epsilon.in_open_unit() {
                return Err(Violation::EpsilonRange { index, epsilon: w.epsilon.clone() });
            }
        }
        if let Some((parent, child)) = self.stem.monotonicity_witness() {
            return Err(Violation::NotMonotone {
                parent_value: *self.stem.get(&parent),
                child_value: *self.stem.get(&child),
                parent,
                child,
            });
        }
        for (index, w) in self.weights.iter().enumerate() {
            let score = score(&self.stem, &w.phi);
            if score <= w.epsilon {
                return Err(Violation::ScoreTooLow { index, score, epsilon: w.epsilon.clone() });
            }
        }
        Ok(())
    }

    /// Whether `self ≤ weaker`: the stem end-extends and every weight of
    /// `weaker` is kept.
    pub fn extends(&self, weaker: &Condition) -> bool {
        self.depth() >= weaker.depth()
            && self.stem.restrict(weaker.depth()) == weaker.stem
            && weaker.weights.iter().all(|w| self.weights.contains(w))
    }

    /// Add `⟨ε, φ⟩`, keeping the stem.
    pub fn attach_weight(&self, epsilon: Rational, phi: WeightFunction) -> Result<Condition, PosetError> {
        if !epsilon.in_open_unit() {
            return Err(PosetError::EpsilonOutOfRange(epsilon));
        }
        let score = score(&self.stem, &phi);
        if score <= epsilon {
            return Err(PosetError::ScoreTooLow { score, epsilon });
        }
        let mut weights = self.weights.clone();
        weights.push(TaggedWeight::new(epsilon, phi));
        Ok(Condition { stem: self.stem.clone(), weights })
    }
}

#[derive(Serialize, Deserialize)]
struct ConditionRepr {
    m: usize,
    h: Vec<(BinaryString, BinaryString)>,
    u: Vec<TaggedWeight>,
}

impl Serialize for Condition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ConditionRepr { m: self.depth(), h: self.stem.pairs().map(|(s, t)| (s, *t)).collect(), u: self.weights.clone() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Condition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = ConditionRepr::deserialize(deserializer)?;
        let stem = Stem::from_pairs(repr.m, repr.h).map_err(serde::de::Error::custom)?;
        Ok(Condition { stem, weights: repr.u })
    }
}

/// How much of the stem's top level lands inside `F`, and its score against `φ_F`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub inside: Rational,
    #[serde(rename = "scoreF")]
    pub score_f: Rational,
}

/// `inside = 2^{-m}·#{s ∈ 2^m : [s]×[h(s)] ⊆ F}` and `scoreF = score(h, φ_F)`.
pub fn certificate(p: &Condition, f: &ClopenPlaneSet) -> Certificate {
    let m = p.depth();
    let (r1, r2) = f.resolution();
    let mut memo: HashMap<(BinaryString, BinaryString), bool> = HashMap::new();
    let mut count: u64 = 0;
    for (i, y) in p.stem.top().iter().enumerate() {
        let s = BinaryString::from_index(m, i as u64);
        let key = (s.prefix(r1.min(m)), y.prefix(r2.min(y.len())));
        if *memo.entry(key).or_insert_with(|| f.contains_rect(&s, y)) {
            count += 1;
        }
    }
    let score_f = match phi_from_clopen(f) {
        Ok(phi) => score(&p.stem, &phi),
        Err(_) => Rational::zero(),
    };
    Certificate { inside: Rational::dyadic(count, m as u32), score_f }
}

/// A countable index for the centered piece containing a condition.
///
/// Conditions with the same index are compatible: they share the stem, and
/// each weight keeps at least `1/k` of slack and of mass.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SigmaIndex {
    pub n: usize,
    #[serde(serialize_with = "serialize_big")]
    pub k: BigInt,
    #[serde(serialize_with = "serialize_stem")]
    pub stem: Stem,
    pub eps: Vec<Rational>,
}

fn serialize_big<S: Serializer>(k: &BigInt, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_str(k)
}

fn serialize_stem<S: Serializer>(stem: &Stem, serializer: S) -> Result<S::Ok, S::Error> {
    let pairs: Vec<(BinaryString, BinaryString)> = stem.pairs().map(|(s, t)| (s, *t)).collect();
    pairs.serialize(serializer)
}

impl SigmaIndex {
    pub fn k_u64(&self) -> Option<u64> {
        self.k.to_u64()
    }
}

/// `(N, k, h, ε-list)` for a valid condition, with `k` the least integer
/// such that `1/k` is at most every mass `φ(∅,∅)` and every slack.
pub fn sigma_centered_index(p: &Condition) -> Result<SigmaIndex, PosetError> {
    p.validate().map_err(PosetError::InvalidCondition)?;
    let mut k = BigInt::from(1);
    for w in &p.weights {
        let slack = score(&p.stem, &w.phi) - &w.epsilon;
        let bound = w.phi.total().min(slack);
        k = k.max(bound.recip().ceil());
    }
    Ok(SigmaIndex { n: p.depth(), k, stem: p.stem.clone(), eps: p.weights.iter().map(|w| w.epsilon.clone()).collect() })
}

/// The common extension `⟨h, u_p ∪ u_q⟩` of two conditions with the same stem.
pub fn merge_same_stem(p: &Condition, q: &Condition) -> Result<Condition, PosetError> {
    if p.stem != q.stem {
        return Err(PosetError::StemMismatch);
    }
    let mut weights = p.weights.clone();
    for w in &q.weights {
        if !weights.contains(w) {
            weights.push(w.clone());
        }
    }
    Ok(Condition { stem: p.stem.clone(), weights })
}
