use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{BinaryString, Rational};

/// A clopen subset of Cantor space, stored as its canonical generator
/// antichain.
///
/// Canonical form: no generator is a prefix of another and no two siblings
/// `s⌢0`, `s⌢1` are both present. Generators are kept in lexicographic
/// (depth-first) order, so structural equality is set equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ClopenSet {
    generators: Vec<BinaryString>,
}

impl ClopenSet {
    pub fn empty() -> Self {
        ClopenSet::default()
    }

    pub fn full() -> Self {
        ClopenSet { generators: vec![BinaryString::EMPTY] }
    }

    pub fn cylinder(s: BinaryString) -> Self {
        ClopenSet { generators: vec![s] }
    }

    /// The unique canonical antichain with the same union as `gens`.
    pub fn canonicalize<I: IntoIterator<Item = BinaryString>>(gens: I) -> Self {
        let gens: Vec<_> = gens.into_iter().collect();
        let mut out = Vec::new();
        canon_into(BinaryString::EMPTY, gens, &mut out);
        ClopenSet { generators: out }
    }

    pub fn generators(&self) -> &[BinaryString] {
        &self.generators
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.generators.len() == 1 && self.generators[0].is_empty()
    }

    /// Length of the longest generator (0 for the empty set).
    pub fn depth(&self) -> usize {
        self.generators.iter().map(|g| g.len()).max().unwrap_or(0)
    }

    /// Lebesgue (coin-flipping) measure: `Σ 2^{-|s|}`.
    pub fn measure(&self) -> Rational {
        let depth = self.depth();
        let numer: BigInt = self.generators.iter().map(|g| BigInt::one() << (depth - g.len())).sum();
        Rational::dyadic(numer, depth as u32)
    }

    /// `[s] ⊆ self`.
    pub fn contains_cylinder(&self, s: &BinaryString) -> bool {
        self.generators.iter().any(|g| g.is_prefix_of(s))
    }

    /// `[s] ∩ self ≠ ∅`.
    pub fn meets_cylinder(&self, s: &BinaryString) -> bool {
        self.generators.iter().any(|g| g.comparable(s))
    }

    pub fn union(&self, other: &ClopenSet) -> ClopenSet {
        ClopenSet::canonicalize(self.generators.iter().chain(&other.generators).copied())
    }

    pub fn intersect(&self, other: &ClopenSet) -> ClopenSet {
        let mut out = Vec::new();
        intersect_into(BinaryString::EMPTY, &self.generators, &other.generators, &mut out);
        let result = ClopenSet { generators: out };
        debug_assert_eq!(result, ClopenSet::canonicalize(result.generators.clone()));
        result
    }

    pub fn complement(&self) -> ClopenSet {
        let mut out = Vec::new();
        complement_into(BinaryString::EMPTY, &self.generators, &mut out);
        ClopenSet { generators: out }
    }

    /// `self − other`.
    pub fn difference(&self, other: &ClopenSet) -> ClopenSet {
        self.intersect(&other.complement())
    }

    pub fn is_disjoint(&self, other: &ClopenSet) -> bool {
        self.generators.iter().all(|a| other.generators.iter().all(|b| !a.comparable(b)))
    }

    pub fn is_subset(&self, other: &ClopenSet) -> bool {
        self.difference(other).is_empty()
    }
}

fn split_by_bit(depth: usize, gens: &[BinaryString]) -> (Vec<BinaryString>, Vec<BinaryString>) {
    gens.iter().partition(|g| !g.bit(depth))
}

fn canon_into(prefix: BinaryString, gens: Vec<BinaryString>, out: &mut Vec<BinaryString>) {
    if gens.is_empty() {
        return;
    }
    if gens.iter().any(|g| g.len() == prefix.len()) {
        out.push(prefix);
        return;
    }
    let (zero, one) = split_by_bit(prefix.len(), &gens);
    let start = out.len();
    canon_into(prefix.child(0), zero, out);
    canon_into(prefix.child(1), one, out);
    if out.len() == start + 2 && out[start] == prefix.child(0) && out[start + 1] == prefix.child(1) {
        out.truncate(start);
        out.push(prefix);
    }
}

fn complement_into(prefix: BinaryString, gens: &[BinaryString], out: &mut Vec<BinaryString>) {
    if gens.is_empty() {
        out.push(prefix);
        return;
    }
    if gens.iter().any(|g| g.len() == prefix.len()) {
        return;
    }
    let (zero, one) = split_by_bit(prefix.len(), gens);
    complement_into(prefix.child(0), &zero, out);
    complement_into(prefix.child(1), &one, out);
}

fn intersect_into(prefix: BinaryString, a: &[BinaryString], b: &[BinaryString], out: &mut Vec<BinaryString>) {
    if a.is_empty() || b.is_empty() {
        return;
    }
    if a.iter().any(|g| g.len() == prefix.len()) {
        out.extend_from_slice(b);
        return;
    }
    if b.iter().any(|g| g.len() == prefix.len()) {
        out.extend_from_slice(a);
        return;
    }
    let (a0, a1) = split_by_bit(prefix.len(), a);
    let (b0, b1) = split_by_bit(prefix.len(), b);
    intersect_into(prefix.child(0), &a0, &b0, out);
    intersect_into(prefix.child(1), &a1, &b1, out);
}

impl fmt::Debug for ClopenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.generators).finish()
    }
}

impl Serialize for ClopenSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.generators.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ClopenSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let gens = Vec::<BinaryString>::deserialize(deserializer)?;
        Ok(ClopenSet::canonicalize(gens))
    }
}

impl FromIterator<BinaryString> for ClopenSet {
    fn from_iter<I: IntoIterator<Item = BinaryString>>(iter: I) -> Self {
        ClopenSet::canonicalize(iter)
    }
}

/// Builds a canonical set from string literals. For tests and examples.
pub fn clopen(gens: &[&str]) -> ClopenSet {
    gens.iter().map(|g| super::bs(g)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic_measure::{bs, rat};

    #[test]
    fn sibling_merge_and_absorption() {
        assert_eq!(clopen(&["00", "01"]), clopen(&["0"]));
        assert_eq!(clopen(&["0", "01"]).generators(), &[bs("0")]);
        assert_eq!(clopen(&["00", "01", "1"]), ClopenSet::full());
        assert!(clopen(&[]).is_empty());
        assert_eq!(clopen(&[]).measure(), Rational::zero());
    }

    #[test]
    fn cascading_merge() {
        let s = clopen(&["000", "001", "01", "10", "110", "111"]);
        assert!(s.is_full());
    }

    #[test]
    fn measures() {
        assert_eq!(clopen(&["0", "10"]).measure(), rat(3, 4));
        assert_eq!(ClopenSet::full().measure(), rat(1, 1));
    }

    #[test]
    fn boolean_ops() {
        assert_eq!(clopen(&["0"]).complement(), clopen(&["1"]));
        assert_eq!(clopen(&["0"]).intersect(&clopen(&["01"])), clopen(&["01"]));
        let d = ClopenSet::full().difference(&clopen(&["11"]));
        assert_eq!(d, clopen(&["0", "10"]));
        assert_eq!(d.measure(), rat(3, 4));
        assert_eq!(ClopenSet::empty().complement(), ClopenSet::full());
        assert_eq!(ClopenSet::full().complement(), ClopenSet::empty());
    }

    #[test]
    fn intersect_nested() {
        let a = clopen(&["00", "01", "1"]);
        let b = clopen(&["0"]);
        assert_eq!(a.intersect(&b), clopen(&["0"]));
        let a = clopen(&["000", "1"]);
        let b = clopen(&["001", "0000"]);
        assert_eq!(a.intersect(&b), clopen(&["0000"]));
    }

    #[test]
    fn json_canonicalizes() {
        let s: ClopenSet = serde_json::from_str(r#"["00","01","1"]"#).unwrap();
        assert!(s.is_full());
        assert_eq!(serde_json::to_string(&clopen(&["0", "10"])).unwrap(), r#"["0","10"]"#);
    }
}
