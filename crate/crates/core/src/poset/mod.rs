//! The poset of conditions `⟨h, u⟩`.
//!
//! `h` is a monotone map from `2^{≤m}` to binary strings and `u` a finite
//! set of weight functions `φ` tagged with thresholds `ε ∈ (0,1)`. A
//! condition is valid when `Σ_{s∈2^m} 2^{|h(s)|} φ(s, h(s)) > ε` for every
//! tagged weight. Stronger conditions extend the stem and add weights.

mod condition;
mod extend;
mod generic;
mod weight;

pub use condition::{
    certificate, merge_same_stem, score, sigma_centered_index, Certificate, Condition, SigmaIndex, Stem, Violation,
};
pub use extend::{exact_variance, extend, extension_delta, one_bit_growth, otimes_holds, ExtendConfig, ExtendReport};
pub use generic::{avoid_null, generic_run, Action, GenericRun, IndexedCertificate, ScheduleEntry, TraceEntry};
pub use weight::{phi_from_clopen, TaggedWeight, WeightError, WeightFunction, MAX_WEIGHT_BITS};

use crate::dyadic_measure::{BinaryString, MeasureError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PosetError {
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("malformed stem: {0}")]
    MalformedStem(String),
    #[error("not a condition: {0}")]
    InvalidCondition(Violation),
    #[error("ε = {0} is outside (0,1)")]
    EpsilonOutOfRange(Rational),
    #[error("score {score} is not above ε = {epsilon}")]
    ScoreTooLow { score: Rational, epsilon: Rational },
    #[error("the set to avoid has full measure")]
    NullSet,
    #[error("conditions do not share a stem")]
    StemMismatch,
    #[error("no labeling found below {s} (weight {phi} kept failing)")]
    SearchExhausted { s: BinaryString, phi: usize },
    #[error("extension needs depth {required}, limit is {limit}")]
    DepthLimit { required: usize, limit: usize },
    #[error("stem value {0} cannot grow further")]
    StringTooLong(BinaryString),
    #[error("extension result failed validation: {0}")]
    PostCheckFailed(Violation),
    #[error("schedule entry at step {at_step} is past the last step {steps}")]
    ScheduleOutOfRange { at_step: usize, steps: usize },
    #[error("step {step}: {source}")]
    AtStep { step: usize, source: Box<PosetError> },
}

impl PosetError {
    fn at(self, step: usize) -> PosetError {
        PosetError::AtStep { step, source: Box::new(self) }
    }
}

/// SplitMix64 finalizer over three words, for deriving independent sub-seeds.
pub(crate) fn mix_seed(seed: u64, a: u64, b: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(mix(mix(seed) ^ a) ^ b)
}
