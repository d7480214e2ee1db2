//! Exact, finite-scale machinery around adding one random real.
//!
//! * [`dyadic_measure`]: rationals, binary strings, clopen sets of Cantor
//!   space and of the Cantor plane with exact measure.
//! * [`name_calculus`]: finite measure-algebra names for functions in `ω^ω`,
//!   Boolean values, slalom extraction and tail-sum refinement.
//! * [`poset`]: the weight-function poset of stems `⟨h,u⟩`, its randomized
//!   extension step, null-set avoidance and centered pieces.
//! * [`smz_rapid`]: strong-measure-zero cover translation and rapid-filter
//!   density bounds.
//! * [`diagram`]: Cichoń's diagram as a constraint checker, with the
//!   random-extension transfer rules.
//! * [`scenario`]: versioned JSON scenarios and reports, driven by the
//!   `forcing-lab` binary.
//!
//! Every example under `examples/` exercises one of these in isolation.

#![allow(clippy::result_large_err)]

pub mod acceptance;
pub mod diagram;
pub mod dyadic_measure;
pub mod name_calculus;
pub mod poset;
pub mod sample;
pub mod scenario;
pub mod smz_rapid;

pub use dyadic_measure::{bs, clopen, plane, rat, BinaryString, ClopenPlaneSet, ClopenSet, Rational};
