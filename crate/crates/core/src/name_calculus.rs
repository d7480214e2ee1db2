//! Finite-horizon measure-algebra names for functions `g ∈ ω^ω`.
//!
//! A [`FiniteName`] assigns to each coordinate `n < K` a labeled clopen
//! partition of Cantor space: the cell labeled `k` is the Boolean value
//! `[[g(n) = k]]`. Infinite quantifiers (`∀^∞`, `∃^∞`) are exposed as
//! finite-horizon predicates together with the index they start from.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dyadic_measure::{ClopenSet, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NameError {
    #[error("coordinate {coord}: cells labeled {a} and {b} overlap")]
    Overlap { coord: usize, a: u64, b: u64 },
    #[error("coordinate {coord}: cells cover measure {covered}, not 1")]
    Deficit { coord: usize, covered: Rational },
    #[error("coordinate {coord}: label {label} appears twice")]
    DuplicateLabel { coord: usize, label: u64 },
    #[error("coordinate {n} is beyond the horizon {horizon}")]
    HorizonExceeded { n: usize, horizon: usize },
    #[error("condition has measure zero")]
    EmptyCondition,
    #[error("f({k}) = {value} lies in the extracted slalom S({k})")]
    SlalomViolation { k: usize, value: u64 },
    #[error("refinement needs coordinates up to {needed}, name horizon is {horizon}")]
    HorizonTooShort { needed: usize, horizon: usize },
    #[error("sequence f has {len} entries, need {needed}")]
    SequenceTooShort { len: usize, needed: usize },
    #[error("threshold must be positive, got {0}")]
    NonpositiveThreshold(Rational),
    #[error("slot {n} has {size} entries, more than (n+1)^2 = {bound}")]
    SlotTooLarge { n: usize, size: usize, bound: usize },
}

impl NameError {
    pub fn is_partition_error(&self) -> bool {
        matches!(self, NameError::Overlap { .. } | NameError::Deficit { .. } | NameError::DuplicateLabel { .. })
    }
}

/// One labeled cell `[[g(n) = label]]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub label: u64,
    pub cells: ClopenSet,
}

impl Cell {
    pub fn new(label: u64, cells: ClopenSet) -> Self {
        Cell { label, cells }
    }
}

/// Checks that labeled cells form an exact partition of Cantor space.
pub fn check_partition(coord: usize, cells: &[Cell]) -> Result<(), NameError> {
    let mut seen = BTreeSet::new();
    for c in cells {
        if !seen.insert(c.label) {
            return Err(NameError::DuplicateLabel { coord, label: c.label });
        }
    }
    for (i, a) in cells.iter().enumerate() {
        for b in &cells[i + 1..] {
            if !a.cells.is_disjoint(&b.cells) {
                return Err(NameError::Overlap { coord, a: a.label, b: b.label });
            }
        }
    }
    let covered: Rational = cells.iter().map(|c| c.cells.measure()).sum();
    if covered != Rational::one() {
        return Err(NameError::Deficit { coord, covered });
    }
    Ok(())
}

/// A finite-horizon name: per coordinate, a labeled clopen partition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteName {
    horizon: usize,
    coords: Vec<Vec<Cell>>,
}

#[derive(Deserialize)]
struct NameRepr {
    horizon: usize,
    coords: Vec<Vec<Cell>>,
}

impl<'de> Deserialize<'de> for FiniteName {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = NameRepr::deserialize(deserializer)?;
        if repr.coords.len() != repr.horizon {
            return Err(serde::de::Error::custom(format!(
                "horizon {} but {} coordinates",
                repr.horizon,
                repr.coords.len()
            )));
        }
        make_name(repr.coords).map_err(serde::de::Error::custom)
    }
}

/// Validates the partition invariant at every coordinate and builds the name.
pub fn make_name(coords: Vec<Vec<Cell>>) -> Result<FiniteName, NameError> {
    for (n, cells) in coords.iter().enumerate() {
        check_partition(n, cells)?;
    }
    Ok(FiniteName { horizon: coords.len(), coords })
}

impl FiniteName {
    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn cells(&self, n: usize) -> &[Cell] {
        &self.coords[n]
    }

    /// `[[g(n) = k]]`; empty when `k` is not a label at `n`.
    pub fn boolean_value(&self, n: usize, k: u64) -> Result<ClopenSet, NameError> {
        let cells = self.coords.get(n).ok_or(NameError::HorizonExceeded { n, horizon: self.horizon })?;
        Ok(cells.iter().find(|c| c.label == k).map(|c| c.cells.clone()).unwrap_or_default())
    }
}

/// A finite slalom: `S(n)` for `n < horizon`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Slalom {
    slots: Vec<BTreeSet<u64>>,
}

#[derive(Deserialize)]
struct SlalomRepr {
    slots: Vec<BTreeSet<u64>>,
}

impl<'de> Deserialize<'de> for Slalom {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = SlalomRepr::deserialize(deserializer)?;
        Slalom::new(repr.slots).map_err(serde::de::Error::custom)
    }
}

impl Slalom {
    /// Accepts slots with `|S(n)| <= (n+1)^2`.
    pub fn new(slots: Vec<BTreeSet<u64>>) -> Result<Self, NameError> {
        for (n, slot) in slots.iter().enumerate() {
            let bound = (n + 1) * (n + 1);
            if slot.len() > bound {
                return Err(NameError::SlotTooLarge { n, size: slot.len(), bound });
            }
        }
        Ok(Slalom { slots })
    }

    pub fn horizon(&self) -> usize {
        self.slots.len()
    }

    pub fn slot(&self, n: usize) -> &BTreeSet<u64> {
        &self.slots[n]
    }

    pub fn slots(&self) -> &[BTreeSet<u64>] {
        &self.slots
    }

    pub fn catches(&self, n: usize, value: u64) -> bool {
        self.slots.get(n).is_some_and(|s| s.contains(&value))
    }
}

/// `1/(n+1)^2`.
pub fn slalom_threshold(n: usize) -> Rational {
    let m = (n as u64 + 1) * (n as u64 + 1);
    Rational::new(1, m)
}

/// Labels whose cell measure is strictly above `threshold`.
///
/// Since cells are disjoint with total measure 1, fewer than `1/threshold`
/// labels can qualify.
pub fn heavy_values(cells: &[Cell], threshold: &Rational) -> Result<BTreeSet<u64>, NameError> {
    if !threshold.is_positive() {
        return Err(NameError::NonpositiveThreshold(threshold.clone()));
    }
    Ok(cells.iter().filter(|c| &c.cells.measure() > threshold).map(|c| c.label).collect())
}

/// `S(n) = {k : μ([[g(n)=k]]) > 1/(n+1)^2}` at every coordinate of the name.
pub fn slalom_extract(g: &FiniteName) -> Slalom {
    let slots = (0..g.horizon())
        .map(|n| heavy_values(g.cells(n), &slalom_threshold(n)).expect("threshold is positive"))
        .collect();
    let s = Slalom { slots };
    debug_assert!(s.slots.iter().enumerate().all(|(n, x)| x.len() < (n + 1) * (n + 1)));
    s
}

/// Result of [`refine_condition`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Refinement {
    /// `q = p − ⋃_{k=n}^{K-1} [[g(k) = f(k)]]`.
    pub q: ClopenSet,
    /// Start of the tail cut out of `p`.
    pub n: usize,
    /// `μ(p) − Σ_{k=n}^{K-1} 1/(k+1)^2`, a guaranteed lower bound on `μ(q)`.
    pub lower_bound: Rational,
}

/// Least `n > max(N, 1)` with `1/(n-1) < μ`, using `Σ_{k≥n} k^{-2} < 1/(n-1)`.
pub fn tail_start(mu: &Rational, big_n: usize) -> usize {
    assert!(mu.is_positive());
    let mut n = big_n.max(1) + 1;
    while &Rational::new(1, (n - 1) as u64) >= mu {
        n += 1;
    }
    n
}

/// Shrinks a positive condition `p` so that it forces `g(k) ≠ f(k)` for every
/// `k` in `[n, horizon)`.
///
/// Requires `f(k) ∉ S(k)` for `k` in `[N, horizon)`, where `S` is the slalom
/// extracted from `g`; then each removed Boolean value has measure at most
/// `1/(k+1)^2` and the tail sum stays below `μ(p)`.
pub fn refine_condition(p: &ClopenSet, g: &FiniteName, f: &[u64], big_n: usize) -> Result<Refinement, NameError> {
    let mu = p.measure();
    if !mu.is_positive() {
        return Err(NameError::EmptyCondition);
    }
    let horizon = g.horizon();
    if f.len() < horizon {
        return Err(NameError::SequenceTooShort { len: f.len(), needed: horizon });
    }
    let slalom = slalom_extract(g);
    for (k, &value) in f.iter().enumerate().take(horizon).skip(big_n) {
        if slalom.catches(k, value) {
            return Err(NameError::SlalomViolation { k, value });
        }
    }
    let n = tail_start(&mu, big_n);
    if n >= horizon {
        return Err(NameError::HorizonTooShort { needed: n + 1, horizon });
    }
    let mut removed = ClopenSet::empty();
    let mut lower_bound = mu;
    for (k, &value) in f.iter().enumerate().take(horizon).skip(n) {
        removed = removed.union(&g.boolean_value(k, value)?);
        lower_bound -= &slalom_threshold(k);
    }
    let q = p.difference(&removed);
    log::debug!("refined at n={n}: mu(q)={} >= {}", q.measure(), lower_bound);
    Ok(Refinement { q, n, lower_bound })
}

/// `f(n) ≠ g(n)` for every `n` with `from <= n` inside both sequences.
pub fn eventually_different(f: &[u64], g: &[u64], from: usize) -> bool {
    f.iter().zip(g).skip(from).all(|(a, b)| a != b)
}

/// `{n : f(n) ∈ S(n)}` within the common horizon.
pub fn infinitely_equal_hits(f: &[u64], s: &Slalom) -> BTreeSet<usize> {
    f.iter().take(s.horizon()).enumerate().filter(|&(n, v)| s.slot(n).contains(v)).map(|(n, _)| n).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic_measure::{clopen, rat};

    fn two_cell() -> FiniteName {
        make_name(vec![vec![Cell::new(0, clopen(&["0"])), Cell::new(1, clopen(&["1"]))]]).unwrap()
    }

    #[test]
    fn make_name_checks_partition() {
        assert_eq!(two_cell().horizon(), 1);
        let overlap = make_name(vec![vec![Cell::new(0, clopen(&["0"])), Cell::new(1, clopen(&["0"]))]]);
        assert_eq!(overlap.unwrap_err(), NameError::Overlap { coord: 0, a: 0, b: 1 });
        let short = make_name(vec![vec![Cell::new(0, clopen(&["0"]))]]);
        assert!(matches!(short, Err(NameError::Deficit { coord: 0, .. })));
        let dup = make_name(vec![vec![Cell::new(0, clopen(&["0"])), Cell::new(0, clopen(&["1"]))]]);
        assert!(matches!(dup, Err(NameError::DuplicateLabel { .. })));
    }

    #[test]
    fn boolean_values() {
        let g = two_cell();
        assert_eq!(g.boolean_value(0, 0).unwrap(), clopen(&["0"]));
        assert!(g.boolean_value(0, 7).unwrap().is_empty());
        let total: Rational = (0..2).map(|k| g.boolean_value(0, k).unwrap().measure()).sum();
        assert_eq!(total, Rational::one());
        assert!(matches!(g.boolean_value(1, 0), Err(NameError::HorizonExceeded { .. })));
    }

    #[test]
    fn slalom_strict_threshold() {
        let g = make_name(vec![
            vec![Cell::new(0, ClopenSet::full())],
            vec![
                Cell::new(0, clopen(&["0"])),
                Cell::new(1, clopen(&["10"])),
                Cell::new(2, clopen(&["110"])),
                Cell::new(3, clopen(&["111"])),
            ],
        ])
        .unwrap();
        let s = slalom_extract(&g);
        assert!(s.slot(0).is_empty());
        assert_eq!(s.slot(1).iter().copied().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn heavy_values_strict() {
        let cells = [Cell::new(7, clopen(&["0"])), Cell::new(9, clopen(&["1"]))];
        assert_eq!(heavy_values(&cells, &rat(1, 4)).unwrap().len(), 2);
        assert!(heavy_values(&cells, &rat(1, 2)).unwrap().is_empty());
        assert!(matches!(heavy_values(&cells, &rat(0, 1)), Err(NameError::NonpositiveThreshold(_))));
        let with_empty = [Cell::new(1, ClopenSet::full()), Cell::new(2, ClopenSet::empty())];
        assert_eq!(heavy_values(&with_empty, &rat(1, 2)).unwrap().len(), 1);
    }

    #[test]
    fn tail_start_search() {
        assert_eq!(tail_start(&rat(1, 1), 1), 3);
        assert_eq!(tail_start(&rat(1, 1), 0), 3);
        assert_eq!(tail_start(&rat(1, 1), 5), 6);
        // 1/(n-1) < 1/10 first at n = 12.
        assert_eq!(tail_start(&rat(1, 10), 1), 12);
    }

    #[test]
    fn refine_rejects_null_and_caught_values() {
        let g = two_cell();
        assert_eq!(refine_condition(&ClopenSet::empty(), &g, &[0], 0), Err(NameError::EmptyCondition));
        let g = make_name(vec![vec![Cell::new(0, ClopenSet::full())]; 2]).unwrap();
        // μ([[g(1)=0]]) = 1 > 1/4, so 0 ∈ S(1).
        assert_eq!(
            refine_condition(&ClopenSet::full(), &g, &[0, 0], 1),
            Err(NameError::SlalomViolation { k: 1, value: 0 })
        );
    }

    #[test]
    fn finite_quantifiers() {
        let f = [1, 2, 3, 4];
        assert!(!eventually_different(&f, &f, 0));
        assert!(!eventually_different(&f, &f, 3));
        assert!(eventually_different(&f, &[0, 2, 0, 0], 2));
        let empty = Slalom::new(vec![BTreeSet::new(); 4]).unwrap();
        assert!(infinitely_equal_hits(&f, &empty).is_empty());
        let diag = Slalom::new((0..4).map(|n| BTreeSet::from([n])).collect()).unwrap();
        let id: Vec<u64> = (0..4).collect();
        assert_eq!(infinitely_equal_hits(&id, &diag), (0..4).collect());
    }

    #[test]
    fn slalom_input_bound_is_non_strict() {
        assert!(Slalom::new(vec![BTreeSet::from([5])]).is_ok());
        assert!(Slalom::new(vec![BTreeSet::from([5, 6])]).is_err());
    }
}
