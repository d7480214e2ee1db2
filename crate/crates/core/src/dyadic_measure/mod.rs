//! Exact arithmetic and clopen-set algebra on Cantor space `2^ω` and the
//! Cantor plane `2^ω × 2^ω`.
//!
//! A [`ClopenSet`] is a finite union of basic cylinders `[s]`, kept as a
//! canonical prefix antichain. A [`ClopenPlaneSet`] is a finite union of
//! rectangles `[s]×[t]`, kept flat at one resolution. Both carry their exact
//! coin-flipping measure as a [`Rational`].

mod clopen;
mod plane;
mod rational;
mod string;

pub use clopen::{clopen, ClopenSet};
pub use plane::{plane, ClopenPlaneSet, MAX_PLANE_BITS};
pub use rational::{rat, ParseRationalError, Rational};
pub use string::{bs, BinaryString, ParseStringError, MAX_LEN};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MeasureError {
    #[error("string of length {got} is shorter than the set's x-resolution {needed}")]
    ResolutionTooCoarse { needed: usize, got: usize },
    #[error("plane resolution needs {bits} bits, limit is {max}")]
    ResolutionTooFine { bits: usize, max: usize },
    #[error("rectangle at resolution {got:?} in a set declared at {expected:?}")]
    ResolutionMismatch { expected: (usize, usize), got: (usize, usize) },
}
