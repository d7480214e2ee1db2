use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Exact signed rational number, always in lowest terms with a positive
/// denominator.
///
/// Every scalar in the crate (measures, thresholds, tolerances) is a
/// `Rational`. Serialized as the text `"p/q"`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        let d = denom.into();
        assert!(!d.is_zero(), "zero denominator");
        Rational(BigRational::new(numer.into(), d))
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    /// `2^{-k}`.
    pub fn pow2_neg(k: u32) -> Self {
        Rational(BigRational::new(BigInt::one(), BigInt::one() << k))
    }

    /// `2^{k}` for a signed exponent.
    pub fn pow2(k: i64) -> Self {
        if k >= 0 {
            Rational::integer(BigInt::one() << k as u64)
        } else {
            Rational::pow2_neg((-k) as u32)
        }
    }

    /// `numer * 2^{-k}`.
    pub fn dyadic(numer: impl Into<BigInt>, k: u32) -> Self {
        Rational(BigRational::new(numer.into(), BigInt::one() << k))
    }

    /// Multiplies by `2^{k}` (any sign) without a general multiplication.
    pub fn scale_pow2(&self, k: i64) -> Self {
        if k == 0 || self.is_zero() {
            return self.clone();
        }
        let (n, d) = (self.0.numer(), self.0.denom());
        if k > 0 {
            Rational(BigRational::new(n << k as u64, d.clone()))
        } else {
            Rational(BigRational::new(n.clone(), d << (-k) as u64))
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    pub fn pow(&self, e: i32) -> Self {
        Rational(num_traits::Pow::pow(&self.0, e))
    }

    pub fn min(self, other: Self) -> Self {
        std::cmp::min(self, other)
    }

    pub fn max(self, other: Self) -> Self {
        std::cmp::max(self, other)
    }

    /// Strictly between 0 and 1.
    pub fn in_open_unit(&self) -> bool {
        self.is_positive() && self.0 < BigRational::one()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Largest power of two strictly below a positive value.
    pub fn dyadic_strictly_below(&self) -> Self {
        assert!(self.is_positive(), "dyadic_strictly_below needs a positive value");
        // Start from a power of two >= self and halve until strictly below.
        let bits = self.0.numer().bits() as i64 - self.0.denom().bits() as i64 + 1;
        let mut p = Rational::pow2(bits);
        while &p >= self {
            p = p.scale_pow2(-1);
        }
        p
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRationalError(s.to_string());
        let t = s.trim();
        match t.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| err())?;
                let d: BigInt = d.trim().parse().map_err(|_| err())?;
                if d.is_zero() {
                    return Err(err());
                }
                Ok(Rational::new(n, d))
            }
            None => t.parse::<BigInt>().map(Rational::integer).map_err(|_| err()),
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::integer(n)
    }
}

impl From<u64> for Rational {
    fn from(n: u64) -> Self {
        Rational::integer(n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((self.0).$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((self.0).$method(&rhs.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: &'a Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $tr<Rational> for &'a Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl AddAssign for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Mul<u64> for &Rational {
    type Output = Rational;
    fn mul(self, rhs: u64) -> Rational {
        Rational(&self.0 * BigRational::from_integer(BigInt::from(rhs)))
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

/// Shorthand for building a rational in tests and examples: `rat(3, 4)`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Least common multiple helper for integer-scaling hot loops.
#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_and_signed() {
        let r = Rational::new(6, -8);
        assert_eq!(r.to_string(), "-3/4");
        assert_eq!(Rational::new(0, 5).to_string(), "0/1");
    }

    #[test]
    fn parse_forms() {
        assert_eq!("3/4".parse::<Rational>().unwrap(), rat(3, 4));
        assert_eq!("2".parse::<Rational>().unwrap(), rat(2, 1));
        assert_eq!(" -10/4 ".parse::<Rational>().unwrap(), rat(-5, 2));
        assert!("1/0".parse::<Rational>().is_err());
        assert!("x/2".parse::<Rational>().is_err());
    }

    #[test]
    fn json_is_text() {
        let v = serde_json::to_string(&rat(1, 8)).unwrap();
        assert_eq!(v, "\"1/8\"");
        let back: Rational = serde_json::from_str(&v).unwrap();
        assert_eq!(back, rat(1, 8));
    }

    #[test]
    fn powers_of_two() {
        assert_eq!(Rational::pow2_neg(3), rat(1, 8));
        assert_eq!(Rational::pow2(3), rat(8, 1));
        assert_eq!(rat(3, 4).scale_pow2(-2), rat(3, 16));
        assert_eq!(rat(3, 4).scale_pow2(2), rat(3, 1));
    }

    #[test]
    fn dyadic_below() {
        assert_eq!(rat(1, 4).dyadic_strictly_below(), rat(1, 8));
        assert_eq!(rat(1, 3).dyadic_strictly_below(), rat(1, 4));
        assert_eq!(rat(5, 1).dyadic_strictly_below(), rat(4, 1));
        assert_eq!(rat(1, 1).dyadic_strictly_below(), rat(1, 2));
    }
}
