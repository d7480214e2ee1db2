use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Longest supported string. Cylinders of depth 64 have measure `2^-64`,
/// far below anything a finite run touches.
pub const MAX_LEN: usize = 64;

/// A finite binary string, the index of the basic cylinder `[s]`.
///
/// Bits are packed into a `u64`, first bit most significant, so the packed
/// value is also the lexicographic index of the string among `2^len`.
/// Ordering is shortlex: shorter strings first, then lexicographic.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct BinaryString {
    len: u8,
    bits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseStringError {
    #[error("invalid character {0:?} in binary string")]
    BadChar(char),
    #[error("binary string longer than {MAX_LEN} bits")]
    TooLong,
}

impl BinaryString {
    pub const EMPTY: BinaryString = BinaryString { len: 0, bits: 0 };

    /// The `index`-th string of length `len` in lexicographic order.
    pub fn from_index(len: usize, index: u64) -> Self {
        assert!(len <= MAX_LEN, "string length {len} exceeds {MAX_LEN}");
        debug_assert!(len == 64 || index < (1u64 << len));
        BinaryString { len: len as u8, bits: index }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        bits.iter().fold(BinaryString::EMPTY, |s, &b| s.push(b))
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Lexicographic index among strings of the same length.
    pub fn index(&self) -> u64 {
        self.bits
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len());
        (self.bits >> (self.len() - 1 - i)) & 1 == 1
    }

    /// `s⌢b`.
    pub fn push(&self, b: bool) -> Self {
        assert!(self.len() < MAX_LEN, "binary string overflow");
        BinaryString { len: self.len + 1, bits: (self.bits << 1) | b as u64 }
    }

    pub fn child(&self, b: u8) -> Self {
        self.push(b != 0)
    }

    /// `s⌢t`.
    pub fn concat(&self, other: &BinaryString) -> Self {
        let len = self.len() + other.len();
        assert!(len <= MAX_LEN, "binary string overflow");
        let bits = if other.len() == 64 { other.bits } else { (self.bits << other.len()) | other.bits };
        BinaryString { len: len as u8, bits }
    }

    /// `s↾n` for `n <= len`.
    pub fn prefix(&self, n: usize) -> Self {
        assert!(n <= self.len());
        let bits = if n == 0 { 0 } else { self.bits >> (self.len() - n) };
        BinaryString { len: n as u8, bits }
    }

    /// Drops the last bit. `None` on the empty string.
    pub fn parent(&self) -> Option<Self> {
        (!self.is_empty()).then(|| self.prefix(self.len() - 1))
    }

    pub fn last(&self) -> Option<bool> {
        (!self.is_empty()).then_some(self.bits & 1 == 1)
    }

    /// `self ⊆ other` as strings, i.e. `[other] ⊆ [self]`.
    pub fn is_prefix_of(&self, other: &BinaryString) -> bool {
        self.len <= other.len && other.prefix(self.len()) == *self
    }

    /// Cylinders `[self]` and `[other]` intersect iff one string extends the other.
    pub fn comparable(&self, other: &BinaryString) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// The string with the last bit flipped.
    pub fn sibling(&self) -> Option<Self> {
        (!self.is_empty()).then_some(BinaryString { len: self.len, bits: self.bits ^ 1 })
    }

    /// All strings of length `len` extending `self`, in lexicographic order.
    pub fn extensions(&self, len: usize) -> impl Iterator<Item = BinaryString> + '_ {
        assert!(len >= self.len() && len <= MAX_LEN);
        let extra = len - self.len();
        let base = if extra == 64 { 0 } else { self.bits << extra };
        (0..1u64 << extra).map(move |i| BinaryString::from_index(len, base | i))
    }

    /// All `2^len` strings of a fixed length.
    pub fn all(len: usize) -> impl Iterator<Item = BinaryString> {
        assert!(len < 64);
        (0..1u64 << len).map(move |i| BinaryString::from_index(len, i))
    }
}

impl Ord for BinaryString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then(self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for BinaryString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BinaryString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinaryString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BinaryString {
    type Err = ParseStringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = BinaryString::EMPTY;
        for c in s.chars() {
            if out.len() == MAX_LEN {
                return Err(ParseStringError::TooLong);
            }
            out = match c {
                '0' => out.push(false),
                '1' => out.push(true),
                other => return Err(ParseStringError::BadChar(other)),
            };
        }
        Ok(out)
    }
}

impl Serialize for BinaryString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BinaryString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses a string literal, panicking on bad input. For tests and examples.
pub fn bs(s: &str) -> BinaryString {
    s.parse().expect("binary string literal")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_text() {
        for s in ["", "0", "1", "0110", "1111111"] {
            assert_eq!(bs(s).to_string(), s);
        }
        assert!("012".parse::<BinaryString>().is_err());
        assert!("0".repeat(65).parse::<BinaryString>().is_err());
        assert!("1".repeat(64).parse::<BinaryString>().is_ok());
    }

    #[test]
    fn prefixes() {
        let s = bs("0110");
        assert_eq!(s.prefix(2), bs("01"));
        assert_eq!(s.prefix(0), BinaryString::EMPTY);
        assert!(bs("01").is_prefix_of(&s));
        assert!(!bs("00").is_prefix_of(&s));
        assert!(BinaryString::EMPTY.is_prefix_of(&s));
        assert_eq!(s.parent(), Some(bs("011")));
        assert_eq!(s.sibling(), Some(bs("0111")));
        assert_eq!(bs("01").concat(&bs("10")), s);
    }

    #[test]
    fn extension_order() {
        let ext: Vec<_> = bs("1").extensions(3).map(|s| s.to_string()).collect();
        assert_eq!(ext, ["100", "101", "110", "111"]);
        assert_eq!(BinaryString::all(2).count(), 4);
    }

    #[test]
    fn shortlex() {
        let mut v = vec![bs("1"), bs("00"), bs(""), bs("01"), bs("0")];
        v.sort();
        assert_eq!(v, vec![bs(""), bs("0"), bs("1"), bs("00"), bs("01")]);
    }
}
