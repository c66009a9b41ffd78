//! Lognormal prime-count estimator: each height contributes `B^h/h` primes
//! whose logarithms are normal with mean `μ̂·h` and deviation `σ̂·√h`.

use crate::primality::{self, DEFAULT_COUNT_BUDGET};
use crate::scalar::{real, Real};

use super::erf::erf;

/// How many heights the sum runs over for a given x.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HeightCap {
    /// ⌈ln x / ln 2⌉: smallest element at height h is 2^h.
    Log2,
    /// ⌈3 ln x / ln 5⌉: smallest elements grow like 5^(h/3).
    ThreeLog5,
}

impl HeightCap {
    pub fn cap<F: Real>(self, ln_x: F) -> usize {
        let c = match self {
            HeightCap::Log2 => ln_x / F::LN_2(),
            HeightCap::ThreeLog5 => real::<F>(3.0) * ln_x / real::<F>(5.0).ln(),
        };
        c.ceil().to_usize().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EstimatorParams<F> {
    pub growth_base: F,
    pub mean_slope: F,
    pub sd_coeff: F,
    pub cap: HeightCap,
    /// First height included in the sum.
    pub first_height: usize,
}

impl<F: Real> EstimatorParams<F> {
    /// B = 2.3, μ̂ = 0.8486, σ̂ = 0.1771, heights 2..=⌈ln x/ln 2⌉.
    pub fn shapiro() -> Self {
        EstimatorParams { growth_base: real(2.3), mean_slope: real(0.8486), sd_coeff: real(0.1771), cap: HeightCap::Log2, first_height: 2 }
    }

    /// B = 1.855, μ̂ = 0.6225, σ̂ = 0.0958, heights 2..=⌈3 ln x/ln 5⌉.
    pub fn dedekind() -> Self {
        EstimatorParams {
            growth_base: real(1.855),
            mean_slope: real(0.6225),
            sd_coeff: real(0.0958),
            cap: HeightCap::ThreeLog5,
            first_height: 2,
        }
    }

    pub fn with_first_height(mut self, h: usize) -> Self {
        self.first_height = h;
        self
    }

    pub fn is_valid(&self) -> bool {
        self.growth_base > F::one() && self.sd_coeff > F::zero() && self.first_height >= 1
    }
}

/// Raw sum and its nearest integer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PiHat<F> {
    pub raw: F,
    pub rounded: u128,
}

/// The estimate at x (x >= 2), given as a real so that x can exceed 2^64.
pub fn pi_hat<F: Real>(x: F, p: &EstimatorParams<F>) -> PiHat<F> {
    let ln_x = x.ln();
    let half = real::<F>(0.5);
    let mut sum = F::zero();
    for h in p.first_height..=p.cap.cap(ln_x) {
        let hf = real::<F>(h as f64);
        let weight = p.growth_base.powi(h as i32) / hf;
        let z = (ln_x - hf * p.mean_slope) / ((real::<F>(2.0) * hf).sqrt() * p.sd_coeff);
        sum = sum + weight * (half + half * erf(z));
    }
    PiHat { raw: sum, rounded: sum.round().to_u128().unwrap_or(0) }
}

/// Where a π(x) value in a comparison row comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PiSource {
    /// Counted by sieve.
    Exact(u64),
    /// Published reference value, stored verbatim.
    Reference(u128),
    Unavailable,
}

impl PiSource {
    pub fn value(&self) -> Option<u128> {
        match *self {
            PiSource::Exact(v) => Some(v as u128),
            PiSource::Reference(v) => Some(v),
            PiSource::Unavailable => None,
        }
    }
}

/// Published π(10^k) beyond sieving range, as (k, significant digits, power
/// of ten they are scaled by). Above 10^14 only 13 digits are known here.
pub const PI_REFERENCE: &[(u32, u64, u32)] = &[
    (11, 4_118_054_813, 0),
    (14, 3_204_941_750_802, 0),
    (17, 2_623_557_157_654, 3),
    (20, 2_220_819_602_560, 6),
    (23, 1_925_320_391_606, 9),
    (26, 1_699_246_750_872, 12),
    (29, 1_520_698_109_714, 15),
];

/// Published π̂ column for x = 10^5, 10^8, ..., 10^29 in the same layout.
pub const PI_HAT_REFERENCE: &[(u32, u64, u32)] = &[
    (5, 9_626, 0),
    (8, 5_761_142, 0),
    (11, 4_117_005_213, 0),
    (14, 3_203_881_084_738, 0),
    (17, 2_622_496_233_613, 3),
    (20, 2_219_758_710_300, 6),
    (23, 1_924_259_538_051, 9),
    (26, 1_698_185_936_196, 12),
    (29, 1_519_637_333_970, 15),
];

/// Published ⌊x/ln x⌋ column, same layout.
pub const X_OVER_LN_REFERENCE: &[(u32, u64, u32)] = &[
    (5, 8_685, 0),
    (8, 5_428_681, 0),
    (11, 3_948_131_653, 0),
    (14, 3_102_103_442_166, 0),
    (17, 2_554_673_422_960, 3),
    (20, 2_171_472_409_516, 6),
    (23, 1_888_236_877_840, 9),
    (26, 1_670_363_391_935, 12),
    (29, 1_497_567_178_976, 15),
];

pub fn scaled(digits: u64, exp10: u32) -> u128 {
    digits as u128 * 10u128.pow(exp10)
}

pub fn reference_at(table: &[(u32, u64, u32)], k: u32) -> Option<u128> {
    table.iter().find(|r| r.0 == k).map(|&(_, d, e)| scaled(d, e))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiCompareRow<F> {
    pub x: u128,
    pub pi: PiSource,
    pub pi_hat: PiHat<F>,
    pub x_over_ln_x: F,
}

impl<F: Real> PiCompareRow<F> {
    pub fn x_over_ln_x_floor(&self) -> u128 {
        self.x_over_ln_x.floor().to_u128().unwrap_or(0)
    }
}

/// π(x), π̂(x) and x/ln x side by side. π(x) is sieved up to 10^9 and taken
/// from [`PI_REFERENCE`] for listed powers of ten beyond that.
pub fn pi_compare_table<F: Real>(xs: &[u128], params: &EstimatorParams<F>) -> Vec<PiCompareRow<F>> {
    xs.iter()
        .map(|&x| {
            let xf = F::from_u128(x).unwrap_or_else(F::infinity);
            let pi = if x <= DEFAULT_COUNT_BUDGET as u128 {
                PiSource::Exact(primality::prime_count_exact(x as u64).expect("within budget"))
            } else {
                power_of_ten(x).and_then(|k| reference_at(PI_REFERENCE, k)).map_or(PiSource::Unavailable, PiSource::Reference)
            };
            PiCompareRow { x, pi, pi_hat: pi_hat(xf, params), x_over_ln_x: xf / xf.ln() }
        })
        .collect()
}

fn power_of_ten(mut x: u128) -> Option<u32> {
    let mut k = 0;
    while x >= 10 && x % 10 == 0 {
        x /= 10;
        k += 1;
    }
    (x == 1).then_some(k)
}

/// x = 10^5, 10^8, ..., 10^29.
pub fn table_xs() -> Vec<u128> {
    (5..=29).step_by(3).map(|k| 10u128.pow(k)).collect()
}
