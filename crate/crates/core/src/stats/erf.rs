//! Error function for any [`Real`].

use crate::scalar::{real, Real};

// below this |z| the positive-term series is used, above it the continued fraction
const SERIES_LIMIT: f64 = 2.5;
const MAX_TERMS: usize = 1000;

/// erf(z), absolute error within a few ulps of 1 for f64 on |z| <= 8.
pub fn erf<F: Real>(z: F) -> F {
    if z.is_nan() {
        return z;
    }
    if z < F::zero() {
        return -erf(-z);
    }
    if z.is_infinite() {
        return F::one();
    }
    if z < real(SERIES_LIMIT) {
        series(z)
    } else {
        F::one() - erfc_fraction(z)
    }
}

/// erfc(z) = 1 - erf(z), without cancellation for large positive z.
pub fn erfc<F: Real>(z: F) -> F {
    if z.is_nan() {
        return z;
    }
    if z < real(SERIES_LIMIT) {
        F::one() - erf(z)
    } else if z.is_infinite() {
        F::zero()
    } else {
        erfc_fraction(z)
    }
}

// erf z = 2/√π · e^(-z²) · Σ_n 2^n z^(2n+1) / (1·3·…·(2n+1)); every term is positive
fn series<F: Real>(z: F) -> F {
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    for n in 1..MAX_TERMS {
        term = term * real::<F>(2.0) * z2 / real(2.0 * n as f64 + 1.0);
        sum = sum + term;
        if term <= sum * F::epsilon() {
            break;
        }
    }
    F::FRAC_2_SQRT_PI() * (-z2).exp() * sum
}

// erfc z = e^(-z²)/√π · 1/(z + (1/2)/(z + 1/(z + (3/2)/(z + …)))), modified Lentz
fn erfc_fraction<F: Real>(z: F) -> F {
    let tiny = F::min_positive_value() / F::epsilon();
    let mut f = z;
    let mut c = f;
    let mut d = F::zero();
    for n in 1..MAX_TERMS {
        let a = real::<F>(n as f64 / 2.0);
        d = z + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = z + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = d.recip();
        let delta = c * d;
        f = f * delta;
        if (delta - F::one()).abs() <= F::epsilon() {
            break;
        }
    }
    (-z * z).exp() / (F::PI().sqrt() * f)
}
