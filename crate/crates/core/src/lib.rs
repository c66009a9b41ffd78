//! Completely additive height functions on the naturals and the
//! multipartition structures they induce.
//!
//! The crate is generic over the integer type ([`scalar::Natural`]) and the
//! real type ([`scalar::Real`]); the aliases below fix the common choices.

pub mod bounds;
pub mod checkpoint;
pub mod enumeration;
pub mod factor;
pub mod genfunc;
pub mod matula;
pub mod primality;
pub mod rules;
pub mod scalar;
pub mod stats;

pub use enumeration::{extend_to, AnyStructure, Budget, EnumError, HeightStructure, Level, LevelCount};
pub use rules::{builtin_rule, Evaluator, HeightRule, Mode, RuleError};

/// Structure over machine words.
pub type WordStructure = HeightStructure<u64>;
/// Structure over arbitrary-precision naturals.
pub type BigStructure = HeightStructure<num_bigint::BigUint>;
pub type Estimator = stats::EstimatorParams<f64>;
