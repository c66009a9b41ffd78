//! Scalar abstractions.
//!
//! Enumeration runs over [`Natural`], implemented for machine words (`u64`)
//! and arbitrary-precision naturals (`BigUint`). Statistical code is generic
//! over [`Real`] (`f32` / `f64`).

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Float, FloatConst, FromPrimitive, ToPrimitive};

use crate::primality;

/// An unsigned integer type that level elements can be stored in.
pub trait Natural:
    Integer
    + Clone
    + Hash
    + Debug
    + Display
    + FromStr
    + ToPrimitive
    + FromPrimitive
    + CheckedMul
    + CheckedAdd
    + CheckedSub
    + Send
    + Sync
    + 'static
{
    /// Short regime label used in reports.
    const REGIME: Regime;

    fn from_word(v: u64) -> Self;

    fn is_prime(&self) -> bool;

    /// Natural logarithm, accurate to f64 precision even past 2^1024.
    fn ln(&self) -> f64;

    /// Rough heap + inline footprint, used for memory budgeting.
    fn approx_bytes(&self) -> usize;

    fn to_biguint(&self) -> BigUint;
}

/// Integer regime of a materialized structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    Word,
    Big,
}

impl Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Regime::Word => "word",
            Regime::Big => "big",
        })
    }
}

impl Natural for u64 {
    const REGIME: Regime = Regime::Word;

    #[inline]
    fn from_word(v: u64) -> Self {
        v
    }

    #[inline]
    fn is_prime(&self) -> bool {
        primality::is_prime_u64(*self)
    }

    #[inline]
    fn ln(&self) -> f64 {
        (*self as f64).ln()
    }

    #[inline]
    fn approx_bytes(&self) -> usize {
        8
    }

    fn to_biguint(&self) -> BigUint {
        BigUint::from(*self)
    }
}

impl Natural for BigUint {
    const REGIME: Regime = Regime::Big;

    fn from_word(v: u64) -> Self {
        BigUint::from(v)
    }

    fn is_prime(&self) -> bool {
        primality::is_prime(self)
    }

    fn ln(&self) -> f64 {
        ln_biguint(self)
    }

    fn approx_bytes(&self) -> usize {
        24 + 8 * self.bits().div_ceil(64) as usize
    }

    fn to_biguint(&self) -> BigUint {
        self.clone()
    }
}

pub(crate) fn ln_biguint(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map_or(f64::NAN, f64::ln);
    }
    // keep the top 64 bits, fold the rest into the exponent
    let shift = bits - 64;
    let top = (n >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Floating-point scalar for statistics and the estimator.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` constant into `F`.
#[inline]
pub(crate) fn real<F: Real>(v: f64) -> F {
    F::from_f64(v).expect("f64 constant representable in target float")
}
