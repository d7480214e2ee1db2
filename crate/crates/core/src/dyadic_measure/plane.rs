use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{BinaryString, ClopenSet, MeasureError, Rational};

/// Largest supported `r1 + r2`. A full plane set at this resolution already
/// holds `2^24` rectangles.
pub const MAX_PLANE_BITS: usize = 24;

/// A clopen subset of the Cantor plane `2^ω × 2^ω`, flattened to rectangles
/// `[s]×[t]` with `|s| = r1`, `|t| = r2`.
///
/// Equality is set equality: two values at different resolutions compare
/// equal when they describe the same set.
#[derive(Clone, Default)]
pub struct ClopenPlaneSet {
    resolution: (usize, usize),
    rects: BTreeSet<(u64, u64)>,
}

impl ClopenPlaneSet {
    pub fn empty() -> Self {
        ClopenPlaneSet::default()
    }

    /// The whole plane as the single rectangle `[∅]×[∅]`.
    pub fn full() -> Self {
        Self::full_at(0, 0)
    }

    pub fn full_at(r1: usize, r2: usize) -> Self {
        assert!(r1 + r2 <= MAX_PLANE_BITS);
        let rects = (0..1u64 << r1).flat_map(|x| (0..1u64 << r2).map(move |y| (x, y))).collect();
        ClopenPlaneSet { resolution: (r1, r2), rects }
    }

    pub fn rectangle(s: BinaryString, t: BinaryString) -> Self {
        let mut rects = BTreeSet::new();
        rects.insert((s.index(), t.index()));
        ClopenPlaneSet { resolution: (s.len(), t.len()), rects }
    }

    /// Flattens arbitrary rectangles to the resolution of the longest sides.
    pub fn from_rects<I>(rects: I) -> Result<Self, MeasureError>
    where
        I: IntoIterator<Item = (BinaryString, BinaryString)>,
    {
        let rects: Vec<_> = rects.into_iter().collect();
        let r1 = rects.iter().map(|(s, _)| s.len()).max().unwrap_or(0);
        let r2 = rects.iter().map(|(_, t)| t.len()).max().unwrap_or(0);
        if r1 + r2 > MAX_PLANE_BITS {
            return Err(MeasureError::ResolutionTooFine { bits: r1 + r2, max: MAX_PLANE_BITS });
        }
        let mut out = ClopenPlaneSet { resolution: (r1, r2), rects: BTreeSet::new() };
        for (s, t) in rects {
            for u in s.extensions(r1) {
                for v in t.extensions(r2) {
                    out.rects.insert((u.index(), v.index()));
                }
            }
        }
        Ok(out)
    }

    /// Builds from rectangles already at a fixed resolution.
    pub fn at_resolution<I>(r1: usize, r2: usize, rects: I) -> Result<Self, MeasureError>
    where
        I: IntoIterator<Item = (BinaryString, BinaryString)>,
    {
        if r1 + r2 > MAX_PLANE_BITS {
            return Err(MeasureError::ResolutionTooFine { bits: r1 + r2, max: MAX_PLANE_BITS });
        }
        let mut set = BTreeSet::new();
        for (s, t) in rects {
            if s.len() != r1 || t.len() != r2 {
                return Err(MeasureError::ResolutionMismatch { expected: (r1, r2), got: (s.len(), t.len()) });
            }
            set.insert((s.index(), t.index()));
        }
        Ok(ClopenPlaneSet { resolution: (r1, r2), rects: set })
    }

    pub fn resolution(&self) -> (usize, usize) {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    pub fn rects(&self) -> impl Iterator<Item = (BinaryString, BinaryString)> + '_ {
        let (r1, r2) = self.resolution;
        self.rects.iter().map(move |&(x, y)| (BinaryString::from_index(r1, x), BinaryString::from_index(r2, y)))
    }

    /// Contains the resolution-level rectangle with these indices.
    pub fn contains_index(&self, x: u64, y: u64) -> bool {
        self.rects.contains(&(x, y))
    }

    /// `count · 2^{-(r1+r2)}`.
    pub fn measure(&self) -> Rational {
        let (r1, r2) = self.resolution;
        Rational::dyadic(self.rects.len() as u64, (r1 + r2) as u32)
    }

    /// The same set at a finer resolution.
    pub fn refine(&self, r1: usize, r2: usize) -> Self {
        let (a, b) = self.resolution;
        assert!(r1 >= a && r2 >= b, "refine cannot coarsen");
        if (r1, r2) == (a, b) {
            return self.clone();
        }
        let (dx, dy) = (r1 - a, r2 - b);
        let mut rects = BTreeSet::new();
        for &(x, y) in &self.rects {
            for i in 0..1u64 << dx {
                for j in 0..1u64 << dy {
                    rects.insert(((x << dx) | i, (y << dy) | j));
                }
            }
        }
        ClopenPlaneSet { resolution: (r1, r2), rects }
    }

    fn common(&self, other: &Self) -> (Self, Self) {
        let r1 = self.resolution.0.max(other.resolution.0);
        let r2 = self.resolution.1.max(other.resolution.1);
        (self.refine(r1, r2), other.refine(r1, r2))
    }

    pub fn union(&self, other: &Self) -> Self {
        let (mut a, b) = self.common(other);
        a.rects.extend(b.rects);
        a
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        let rects = a.rects.intersection(&b.rects).copied().collect();
        ClopenPlaneSet { resolution: a.resolution, rects }
    }

    pub fn difference(&self, other: &Self) -> Self {
        let (a, b) = self.common(other);
        let rects = a.rects.difference(&b.rects).copied().collect();
        ClopenPlaneSet { resolution: a.resolution, rects }
    }

    pub fn complement(&self) -> Self {
        let (r1, r2) = self.resolution;
        let full = Self::full_at(r1, r2);
        let rects = full.rects.difference(&self.rects).copied().collect();
        ClopenPlaneSet { resolution: (r1, r2), rects }
    }

    fn block(&self, s: &BinaryString, t: &BinaryString) -> (Vec<BinaryString>, Vec<BinaryString>) {
        let (r1, r2) = self.resolution;
        let xs = if s.len() >= r1 { vec![s.prefix(r1)] } else { s.extensions(r1).collect() };
        let ys = if t.len() >= r2 { vec![t.prefix(r2)] } else { t.extensions(r2).collect() };
        (xs, ys)
    }

    /// `[s]×[t] ⊆ self`.
    pub fn contains_rect(&self, s: &BinaryString, t: &BinaryString) -> bool {
        let (xs, ys) = self.block(s, t);
        xs.iter().all(|u| ys.iter().all(|v| self.rects.contains(&(u.index(), v.index()))))
    }

    /// `[s]×[t] ∩ self ≠ ∅`.
    pub fn meets_rect(&self, s: &BinaryString, t: &BinaryString) -> bool {
        let (xs, ys) = self.block(s, t);
        xs.iter().any(|u| ys.iter().any(|v| self.rects.contains(&(u.index(), v.index()))))
    }

    /// The vertical section over `[s]`, which is constant there when
    /// `|s| >= r1`.
    pub fn section_x(&self, s: &BinaryString) -> Result<ClopenSet, MeasureError> {
        let (r1, r2) = self.resolution;
        if s.len() < r1 {
            return Err(MeasureError::ResolutionTooCoarse { needed: r1, got: s.len() });
        }
        let x = s.prefix(r1).index();
        Ok(self.rects.range((x, 0)..=(x, u64::MAX)).map(|&(_, y)| BinaryString::from_index(r2, y)).collect())
    }
}

impl PartialEq for ClopenPlaneSet {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.common(other);
        a.rects == b.rects
    }
}

impl Eq for ClopenPlaneSet {}

impl fmt::Debug for ClopenPlaneSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClopenPlaneSet")
            .field("resolution", &self.resolution)
            .field("rects", &self.rects().collect::<Vec<_>>())
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
struct PlaneRepr {
    resolution: [usize; 2],
    rects: Vec<(BinaryString, BinaryString)>,
}

impl Serialize for ClopenPlaneSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        PlaneRepr { resolution: [self.resolution.0, self.resolution.1], rects: self.rects().collect() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ClopenPlaneSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = PlaneRepr::deserialize(deserializer)?;
        let [r1, r2] = repr.resolution;
        ClopenPlaneSet::at_resolution(r1, r2, repr.rects).map_err(serde::de::Error::custom)
    }
}

/// Builds a plane set from string-literal rectangles. For tests and examples.
pub fn plane(rects: &[(&str, &str)]) -> ClopenPlaneSet {
    ClopenPlaneSet::from_rects(rects.iter().map(|(s, t)| (super::bs(s), super::bs(t)))).expect("plane literal")
}
