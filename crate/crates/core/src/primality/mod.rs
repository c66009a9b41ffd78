//! Prime infrastructure: sieved tables, nth-prime / prime-index lookup,
//! primality testing and exact prime counting.
//!
//! Primes are 1-indexed everywhere: `p_1 = 2`.

mod probable;
mod sieve;

use std::ops::ControlFlow;

use thiserror::Error;

pub use probable::{is_prime, is_prime_u64, is_prime_with, WitnessPolicy};

/// Hard cap on table limits unless the caller configures one (2^31).
pub const DEFAULT_SIEVE_CAP: u64 = 1 << 31;

/// Largest x accepted by [`prime_count_exact`] by default.
pub const DEFAULT_COUNT_BUDGET: u64 = 1_000_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrimeError {
    #[error("sieve limit {limit} must be at least 2")]
    LimitTooSmall { limit: u64 },
    #[error("sieve limit {requested} exceeds the configured cap {cap}")]
    OverCap { requested: u64, cap: u64 },
    #[error("prime index {index} is beyond the table ({available} primes up to {limit}); re-sieve to at least {required_limit}")]
    IndexOutOfRange { index: u64, available: u64, limit: u64, required_limit: u64 },
    #[error("value {value} is above the sieve limit {limit}")]
    AboveLimit { value: u64, limit: u64 },
    #[error("prime index must be positive")]
    ZeroIndex,
}

/// Ascending primes up to `limit`, stored compactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u32>,
    cap: u64,
}

impl PrimeTable {
    /// Sieves all primes `<= limit` under [`DEFAULT_SIEVE_CAP`].
    pub fn sieve_to(limit: u64) -> Result<Self, PrimeError> {
        Self::sieve_with_cap(limit, DEFAULT_SIEVE_CAP)
    }

    pub fn sieve_with_cap(limit: u64, cap: u64) -> Result<Self, PrimeError> {
        if limit < 2 {
            return Err(PrimeError::LimitTooSmall { limit });
        }
        let cap = cap.min(u32::MAX as u64);
        if limit > cap {
            return Err(PrimeError::OverCap { requested: limit, cap });
        }
        let mut table = PrimeTable { limit: 1, primes: Vec::new(), cap };
        table.sieve_range(limit);
        Ok(table)
    }

    fn sieve_range(&mut self, new_limit: u64) {
        let lo = self.limit + 1;
        if let Some(est) = upper_count_estimate(new_limit).checked_sub(self.primes.len() as u64) {
            self.primes.reserve(est as usize);
        }
        let primes = &mut self.primes;
        let _ = sieve::visit_primes(lo, new_limit, |p| {
            primes.push(p as u32);
            ControlFlow::Continue(())
        });
        self.limit = new_limit;
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// π(limit).
    pub fn count(&self) -> u64 {
        self.primes.len() as u64
    }

    /// The i-th prime, 1-indexed.
    pub fn nth(&self, i: u64) -> Result<u64, PrimeError> {
        if i == 0 {
            return Err(PrimeError::ZeroIndex);
        }
        self.primes.get((i - 1) as usize).map(|&p| p as u64).ok_or(PrimeError::IndexOutOfRange {
            index: i,
            available: self.count(),
            limit: self.limit,
            required_limit: nth_prime_upper_bound(i),
        })
    }

    /// Index i with p_i = p, or `None` when p is not prime.
    pub fn index_of(&self, p: u64) -> Result<Option<u64>, PrimeError> {
        if p > self.limit {
            return Err(PrimeError::AboveLimit { value: p, limit: self.limit });
        }
        if p > u32::MAX as u64 {
            return Ok(None);
        }
        Ok(self.primes.binary_search(&(p as u32)).ok().map(|i| i as u64 + 1))
    }

    pub fn contains(&self, p: u64) -> bool {
        matches!(self.index_of(p), Ok(Some(_)))
    }

    /// Extends the table so that it covers `value`, failing past the cap.
    pub fn ensure_limit(&mut self, value: u64) -> Result<(), PrimeError> {
        if value <= self.limit {
            return Ok(());
        }
        if value > self.cap {
            return Err(PrimeError::OverCap { requested: value, cap: self.cap });
        }
        // grow geometrically to amortize repeated small extensions
        let target = value.max(self.limit.saturating_mul(2)).min(self.cap);
        self.sieve_range(target);
        Ok(())
    }

    /// Extends the table until it holds at least `i` primes.
    pub fn ensure_index(&mut self, i: u64) -> Result<(), PrimeError> {
        if i <= self.count() {
            return Ok(());
        }
        let bound = nth_prime_upper_bound(i);
        self.ensure_limit(bound.min(self.cap))?;
        if i > self.count() {
            return Err(PrimeError::OverCap { requested: bound, cap: self.cap });
        }
        Ok(())
    }

    /// Like [`nth`](Self::nth) but extends the table on demand.
    pub fn nth_extending(&mut self, i: u64) -> Result<u64, PrimeError> {
        self.ensure_index(i)?;
        self.nth(i)
    }

    /// Like [`index_of`](Self::index_of) but extends the table on demand.
    pub fn index_of_extending(&mut self, p: u64) -> Result<Option<u64>, PrimeError> {
        self.ensure_limit(p)?;
        self.index_of(p)
    }
}

/// Rosser-type bound: p_n < n (ln n + ln ln n) for n >= 6.
pub fn nth_prime_upper_bound(n: u64) -> u64 {
    if n < 6 {
        return 13;
    }
    let x = n as f64;
    (x * (x.ln() + x.ln().ln())).ceil() as u64 + 1
}

fn upper_count_estimate(x: u64) -> u64 {
    if x < 17 {
        return 7;
    }
    let xf = x as f64;
    (1.26 * xf / xf.ln()) as u64
}

/// The i-th prime without storing the table (for indices far beyond memory).
pub fn nth_prime_streaming(i: u64, cap: u64) -> Result<u64, PrimeError> {
    if i == 0 {
        return Err(PrimeError::ZeroIndex);
    }
    let bound = nth_prime_upper_bound(i);
    if bound > cap {
        return Err(PrimeError::OverCap { requested: bound, cap });
    }
    let mut seen = 0u64;
    let mut found = 0u64;
    let _ = sieve::visit_primes(0, bound, |p| {
        seen += 1;
        if seen == i {
            found = p;
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(found)
}

/// Exact π(x) for `x <= DEFAULT_COUNT_BUDGET`.
pub fn prime_count_exact(x: u64) -> Result<u64, PrimeError> {
    prime_count_with_budget(x, DEFAULT_COUNT_BUDGET)
}

pub fn prime_count_with_budget(x: u64, budget: u64) -> Result<u64, PrimeError> {
    if x > budget {
        return Err(PrimeError::OverCap { requested: x, cap: budget });
    }
    Ok(sieve::count_primes(x))
}
