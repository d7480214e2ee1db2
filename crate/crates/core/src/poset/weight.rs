use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dyadic_measure::{BinaryString, ClopenPlaneSet, Rational};

/// Largest supported `M1 + M2` for a weight table.
pub const MAX_WEIGHT_BITS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeightError {
    #[error("resolution ({0}, {1}) exceeds {MAX_WEIGHT_BITS} bits")]
    ResolutionTooLarge(usize, usize),
    #[error("table has {got} entries, resolution needs {expected}")]
    TableSize { expected: usize, got: usize },
    #[error("entry ({s}, {t}) = {value} outside [0, 2^-(M1+M2)]")]
    EntryOutOfRange { s: BinaryString, t: BinaryString, value: Rational },
    #[error("total mass is zero")]
    ZeroMass,
}

/// A weight function on pairs of binary strings, given by its values on
/// `2^{M1} × 2^{M2}`.
///
/// Below the resolution a value is the sum over extensions; beyond it the
/// mass halves with every extra bit. That makes `eval` additive in each
/// coordinate for all strings and keeps `eval(s,t) <= 2^{-(|s|+|t|)}`.
#[derive(Clone)]
pub struct WeightFunction {
    resolution: (usize, usize),
    table: Vec<Rational>,
    // Block sums for every (a, b) <= resolution, level a*(M2+1)+b, entry (x << b) | y.
    pyramid: Vec<Vec<Rational>>,
}

impl WeightFunction {
    /// `table[x * 2^{M2} + y]` is the weight of the `x`-th string of length
    /// `M1` paired with the `y`-th string of length `M2`.
    pub fn new(m1: usize, m2: usize, table: Vec<Rational>) -> Result<Self, WeightError> {
        if m1 + m2 > MAX_WEIGHT_BITS {
            return Err(WeightError::ResolutionTooLarge(m1, m2));
        }
        let expected = 1usize << (m1 + m2);
        if table.len() != expected {
            return Err(WeightError::TableSize { expected, got: table.len() });
        }
        let cap = Rational::pow2_neg((m1 + m2) as u32);
        for (i, v) in table.iter().enumerate() {
            if v.is_negative() || v > &cap {
                return Err(WeightError::EntryOutOfRange {
                    s: BinaryString::from_index(m1, (i >> m2) as u64),
                    t: BinaryString::from_index(m2, (i & ((1 << m2) - 1)) as u64),
                    value: v.clone(),
                });
            }
        }
        let pyramid = build_pyramid(m1, m2, &table);
        let w = WeightFunction { resolution: (m1, m2), table, pyramid };
        if !w.total().is_positive() {
            return Err(WeightError::ZeroMass);
        }
        Ok(w)
    }

    /// The uniform weight `φ(s,t) = 2^{-(|s|+|t|)}`.
    pub fn full() -> Self {
        WeightFunction::new(0, 0, vec![Rational::one()]).expect("full weight")
    }

    pub fn resolution(&self) -> (usize, usize) {
        self.resolution
    }

    pub fn table(&self) -> &[Rational] {
        &self.table
    }

    fn level(&self, a: usize, b: usize) -> &[Rational] {
        &self.pyramid[a * (self.resolution.1 + 1) + b]
    }

    /// `φ(∅,∅)`, the total mass.
    pub fn total(&self) -> Rational {
        self.level(0, 0)[0].clone()
    }

    /// `φ(s,t)`.
    pub fn eval(&self, s: &BinaryString, t: &BinaryString) -> Rational {
        let (m1, m2) = self.resolution;
        let a = s.len().min(m1);
        let b = t.len().min(m2);
        let base = &self.level(a, b)[((s.prefix(a).index() << b) | t.prefix(b).index()) as usize];
        let extra = (s.len() - a) + (t.len() - b);
        base.scale_pow2(-(extra as i64))
    }

    /// Block sum at `(a, b)` for prefix indices, without the halving factor.
    pub(crate) fn block(&self, a: usize, b: usize, x: u64, y: u64) -> &Rational {
        &self.level(a, b)[((x << b) | y) as usize]
    }
}

fn build_pyramid(m1: usize, m2: usize, table: &[Rational]) -> Vec<Vec<Rational>> {
    let mut levels: Vec<Vec<Rational>> = vec![Vec::new(); (m1 + 1) * (m2 + 1)];
    let at = |a: usize, b: usize| a * (m2 + 1) + b;
    levels[at(m1, m2)] = table.to_vec();
    for a in (0..=m1).rev() {
        for b in (0..=m2).rev() {
            if (a, b) == (m1, m2) {
                continue;
            }
            let mut out = Vec::with_capacity(1 << (a + b));
            if a < m1 {
                // Sum over the next x-bit: entry (x, y) at (a+1, b) is (x<<1|i) << b | y.
                let src = &levels[at(a + 1, b)];
                for x in 0..1usize << a {
                    for y in 0..1usize << b {
                        let i0 = ((x << 1) << b) | y;
                        let i1 = (((x << 1) | 1) << b) | y;
                        out.push(&src[i0] + &src[i1]);
                    }
                }
            } else {
                let src = &levels[at(a, b + 1)];
                for x in 0..1usize << a {
                    for y in 0..1usize << b {
                        let i0 = (x << (b + 1)) | (y << 1);
                        out.push(&src[i0] + &src[i0 | 1]);
                    }
                }
            }
            levels[at(a, b)] = out;
        }
    }
    levels
}

/// `φ_F(s,t) = μ([s]×[t] ∩ F)` for a clopen plane set of positive measure.
pub fn phi_from_clopen(f: &ClopenPlaneSet) -> Result<WeightFunction, WeightError> {
    let (r1, r2) = f.resolution();
    if r1 + r2 > MAX_WEIGHT_BITS {
        return Err(WeightError::ResolutionTooLarge(r1, r2));
    }
    if f.is_empty() {
        return Err(WeightError::ZeroMass);
    }
    let cell = Rational::pow2_neg((r1 + r2) as u32);
    let mut table = vec![Rational::zero(); 1 << (r1 + r2)];
    for (s, t) in f.rects() {
        table[((s.index() << r2) | t.index()) as usize] = cell.clone();
    }
    WeightFunction::new(r1, r2, table)
}

impl PartialEq for WeightFunction {
    fn eq(&self, other: &Self) -> bool {
        self.resolution == other.resolution && self.table == other.table
    }
}

impl Eq for WeightFunction {}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFunction").field("resolution", &self.resolution).field("total", &self.total()).finish()
    }
}

#[derive(Serialize, Deserialize)]
struct WeightRepr {
    resolution: [usize; 2],
    table: Vec<Vec<Rational>>,
}

impl Serialize for WeightFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let width = 1 << self.resolution.1;
        WeightRepr {
            resolution: [self.resolution.0, self.resolution.1],
            table: self.table.chunks(width).map(|r| r.to_vec()).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for WeightFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let repr = WeightRepr::deserialize(deserializer)?;
        let [m1, m2] = repr.resolution;
        if repr.table.len() != 1 << m1 || repr.table.iter().any(|r| r.len() != 1 << m2) {
            return Err(serde::de::Error::custom("weight table shape does not match resolution"));
        }
        WeightFunction::new(m1, m2, repr.table.into_iter().flatten().collect()).map_err(serde::de::Error::custom)
    }
}

/// A constraint `⟨ε, φ⟩`: the stem must score strictly above `ε` against `φ`.
///
/// `ε` is meant to lie in `(0,1)`; the range is checked by
/// [`Condition::validate`](super::Condition::validate) rather than here so
/// that out-of-range tags can be reported.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaggedWeight {
    #[serde(rename = "eps")]
    pub epsilon: Rational,
    pub phi: WeightFunction,
}

impl TaggedWeight {
    pub fn new(epsilon: Rational, phi: WeightFunction) -> Self {
        TaggedWeight { epsilon, phi }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic_measure::{bs, plane, rat};

    fn sample() -> WeightFunction {
        // resolution (1,1), cap 1/4
        WeightFunction::new(1, 1, vec![rat(1, 4), rat(1, 8), rat(0, 1), rat(1, 16)]).unwrap()
    }

    #[test]
    fn uniform_mass() {
        let full = WeightFunction::full();
        for (s, t) in [("", ""), ("0", "11"), ("0101", "")] {
            let (s, t) = (bs(s), bs(t));
            assert_eq!(full.eval(&s, &t), Rational::pow2_neg((s.len() + t.len()) as u32));
        }
    }

    #[test]
    fn sums_and_halving() {
        let w = sample();
        assert_eq!(w.total(), rat(7, 16));
        assert_eq!(w.eval(&bs("0"), &bs("")), rat(3, 8));
        assert_eq!(w.eval(&bs(""), &bs("1")), rat(3, 16));
        assert_eq!(w.eval(&bs("01"), &bs("0")), rat(1, 8));
        assert_eq!(w.eval(&bs("0"), &bs("01")), rat(1, 8));
        assert_eq!(w.eval(&bs("10"), &bs("11")), rat(1, 64));
    }

    #[test]
    fn rejects_bad_tables() {
        assert_eq!(WeightFunction::new(0, 0, vec![rat(0, 1)]).unwrap_err(), WeightError::ZeroMass);
        assert!(matches!(
            WeightFunction::new(1, 0, vec![rat(1, 1), rat(0, 1)]),
            Err(WeightError::EntryOutOfRange { .. })
        ));
        assert!(matches!(WeightFunction::new(1, 1, vec![rat(0, 1)]), Err(WeightError::TableSize { .. })));
    }

    #[test]
    fn clopen_weights() {
        let w = phi_from_clopen(&ClopenPlaneSet::full()).unwrap();
        assert_eq!(w.total(), rat(1, 1));
        let w = phi_from_clopen(&plane(&[("0", "0")])).unwrap();
        assert_eq!(w.eval(&bs("0"), &bs("0")), rat(1, 4));
        assert_eq!(w.eval(&bs("1"), &bs("0")), rat(0, 1));
        assert_eq!(w.eval(&bs("1"), &bs("")), rat(0, 1));
        assert_eq!(phi_from_clopen(&ClopenPlaneSet::empty()).unwrap_err(), WeightError::ZeroMass);
    }

    #[test]
    fn json_shape() {
        let v = serde_json::to_value(sample()).unwrap();
        assert_eq!(v["resolution"], serde_json::json!([1, 1]));
        assert_eq!(v["table"][0], serde_json::json!(["1/4", "1/8"]));
        let back: WeightFunction = serde_json::from_value(v).unwrap();
        assert_eq!(back, sample());
    }
}
