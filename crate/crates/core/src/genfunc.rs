//! Coefficients of Euler products, the counting oracle for enumerations.
//!
//! Every product here has the form `∏_k (1 - q^k)^(-e_k)` for integer
//! exponents e_k. Taking the logarithmic derivative gives
//!
//! ```text
//! n·N_n = Σ_{j=1}^{n} c_j·N_{n-j},   c_j = Σ_{d | j} d·e_d
//! ```
//!
//! which is evaluated exactly over big integers.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Largest n accepted by [`brute_force_count`].
pub const BRUTE_FORCE_CAP: usize = 40;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GenfuncError {
    #[error("brute-force count is limited to n <= {cap}, got {n}")]
    SizeCap { n: usize, cap: usize },
    #[error("scaling factor a must be at least 1")]
    ZeroScale,
}

/// Coefficients N_0..N_H of a generating function together with the
/// generator profile it was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffSeries {
    /// π_1, π_2, ...
    pub pi_profile: Vec<u64>,
    pub coeffs: Vec<BigUint>,
}

impl CoeffSeries {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// N_n
    pub fn get(&self, n: usize) -> Option<&BigUint> {
        self.coeffs.get(n)
    }

    pub fn to_u64(&self) -> Option<Vec<u64>> {
        self.coeffs.iter().map(ToPrimitive::to_u64).collect()
    }

    fn from_signed(pi_profile: &[u64], coeffs: Vec<BigInt>) -> Self {
        let coeffs = coeffs
            .into_iter()
            .map(|c| c.to_biguint().expect("product of nonnegative-coefficient factors"))
            .collect();
        CoeffSeries { pi_profile: pi_profile.to_vec(), coeffs }
    }
}

fn pi_at(pi: &[u64], k: usize) -> u64 {
    if k == 0 { 0 } else { pi.get(k - 1).copied().unwrap_or(0) }
}

/// `[q^n] ∏_k (1 - q^k)^(-e_k)` for n = 0..=h, with `exponents[k]` = e_k
/// (index 0 ignored, missing entries are 0).
pub fn euler_product(exponents: &[BigInt], h: usize) -> Vec<BigInt> {
    let e = |k: usize| exponents.get(k).cloned().unwrap_or_default();
    let mut c = vec![BigInt::zero(); h + 1];
    for d in 1..=h {
        let ed = e(d);
        if ed.is_zero() {
            continue;
        }
        let term = &ed * d;
        for j in (d..=h).step_by(d) {
            c[j] += &term;
        }
    }
    let mut n_coef = Vec::with_capacity(h + 1);
    n_coef.push(BigInt::one());
    for n in 1..=h {
        let mut acc = BigInt::zero();
        for j in 1..=n {
            if !c[j].is_zero() {
                acc += &c[j] * &n_coef[n - j];
            }
        }
        let (q, r) = acc.div_rem(&BigInt::from(n));
        debug_assert!(r.is_zero());
        n_coef.push(q);
    }
    n_coef
}

/// `[q^n] ∏_{k<=h} (1 - q^k)^(-π_k)`.
pub fn multipartition_counts(pi_profile: &[u64], h: usize) -> CoeffSeries {
    let exps: Vec<BigInt> = (0..=h).map(|k| BigInt::from(pi_at(pi_profile, k))).collect();
    CoeffSeries::from_signed(pi_profile, euler_product(&exps, h))
}

/// `[q^n] ∏_{k<=h} (1 + q^k)^(π_k)`, using `1 + q^k = (1 - q^2k)/(1 - q^k)`.
pub fn distinct_counts(pi_profile: &[u64], h: usize) -> CoeffSeries {
    let exps: Vec<BigInt> = (0..=h)
        .map(|k| {
            let half = if k % 2 == 0 { pi_at(pi_profile, k / 2) } else { 0 };
            BigInt::from(pi_at(pi_profile, k)) - BigInt::from(half)
        })
        .collect();
    CoeffSeries::from_signed(pi_profile, euler_product(&exps, h))
}

/// Counts for `a·H + b·Ω`: a prime at height n moves to height `a·n + b`,
/// so the product is `∏_n (1 - q^(a·n + b))^(-π_n)`.
pub fn scaled_counts(pi_profile: &[u64], a: usize, b: usize, h: usize) -> Result<CoeffSeries, GenfuncError> {
    if a == 0 {
        return Err(GenfuncError::ZeroScale);
    }
    let mut exps = vec![BigInt::zero(); h + 1];
    for (i, &p) in pi_profile.iter().enumerate() {
        let deg = a * (i + 1) + b;
        if deg <= h {
            exps[deg] += p;
        }
    }
    Ok(CoeffSeries::from_signed(pi_profile, euler_product(&exps, h)))
}

/// The product `∏_n (1 - q^(a·n))^(-π_(n-b))` exactly as it is sometimes
/// written. It agrees with [`scaled_counts`] only when `a = 1` or `b = 0`.
pub fn scaled_counts_shifted_index(pi_profile: &[u64], a: usize, b: usize, h: usize) -> Result<CoeffSeries, GenfuncError> {
    if a == 0 {
        return Err(GenfuncError::ZeroScale);
    }
    let mut exps = vec![BigInt::zero(); h + 1];
    for n in (b + 1)..=h / a {
        exps[a * n] += pi_at(pi_profile, n - b);
    }
    Ok(CoeffSeries::from_signed(pi_profile, euler_product(&exps, h)))
}

/// Counts for index-recursive rules `H(p_i) = H(f(i)) + 1` solved as a fixed
/// point: the primes at height n are generated by the elements at height n-1.
///
/// `generators(n, counts_so_far)` returns π_n from N_0..N_(n-1).
pub fn recursive_counts(h: usize, generators: impl Fn(usize, &[BigInt]) -> BigInt) -> Vec<BigInt> {
    let mut n_coef = vec![BigInt::one()];
    let mut exps = vec![BigInt::zero()];
    let mut c = vec![BigInt::zero()];
    for n in 1..=h {
        exps.push(generators(n, &n_coef));
        c.push(BigInt::zero());
        // c_n picks up d·e_d for every divisor d of n; all e_d with d <= n are now known
        for d in 1..=n {
            if n % d == 0 {
                c[n] = &c[n] + &exps[d] * d;
            }
        }
        let mut acc = BigInt::zero();
        for j in 1..=n {
            acc += &c[j] * &n_coef[n - j];
        }
        n_coef.push(acc / n);
    }
    n_coef
}

/// Multisets of parts where size k comes in π_k colours, summing to n,
/// counted by direct recursion over the largest part size.
pub fn brute_force_count(pi_profile: &[u64], n: usize) -> Result<BigUint, GenfuncError> {
    if n > BRUTE_FORCE_CAP {
        return Err(GenfuncError::SizeCap { n, cap: BRUTE_FORCE_CAP });
    }
    let mut memo = HashMap::new();
    Ok(count_with_parts_at_most(pi_profile, n, n, &mut memo))
}

fn count_with_parts_at_most(pi: &[u64], n: usize, k: usize, memo: &mut HashMap<(usize, usize), BigUint>) -> BigUint {
    if n == 0 {
        return BigUint::one();
    }
    if k == 0 {
        return BigUint::zero();
    }
    if let Some(v) = memo.get(&(n, k)) {
        return v.clone();
    }
    let colours = pi_at(pi, k);
    let mut total = BigUint::zero();
    // m copies of size-k parts drawn from `colours` kinds: C(colours + m - 1, m) ways
    for m in 0..=n / k {
        let ways = multichoose(colours, m as u64);
        if ways.is_zero() {
            continue;
        }
        total += ways * count_with_parts_at_most(pi, n - m * k, k - 1, memo);
    }
    memo.insert((n, k), total.clone());
    total
}

fn multichoose(kinds: u64, m: u64) -> BigUint {
    if m == 0 {
        return BigUint::one();
    }
    if kinds == 0 {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..m {
        acc = acc * BigUint::from(kinds + i) / BigUint::from(i + 1);
    }
    acc
}

/// Signed helper for callers that want to inspect raw product coefficients.
pub fn any_negative(coeffs: &[BigInt]) -> bool {
    coeffs.iter().any(Signed::is_negative)
}
