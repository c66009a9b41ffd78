//! Per-height statistics of a materialized structure.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::enumeration::HeightStructure;
use crate::rules::RuleKind;
use crate::scalar::Natural;

use super::StatsError;

/// Mean and population SD of ln v, scaled by 1/h and 1/√h.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogMoments {
    pub count: usize,
    pub mean_log_over_h: f64,
    pub sd_log_over_sqrt_h: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelStats {
    pub h: usize,
    pub count: usize,
    pub prime_count: usize,
    pub primes: LogMoments,
    pub all: Option<LogMoments>,
}

/// Moments of `ln v` over `values`, scaled for height h (h >= 1).
pub fn log_moments<'a, N: Natural>(values: impl IntoIterator<Item = &'a N>, h: usize) -> Option<LogMoments> {
    let logs: Vec<f64> = values.into_iter().map(Natural::ln).collect();
    if logs.is_empty() || h == 0 {
        return None;
    }
    let n = logs.len() as f64;
    let mean = logs.iter().sum::<f64>() / n;
    let var = logs.iter().map(|l| (l - mean) * (l - mean)).sum::<f64>() / n;
    let hf = h as f64;
    Some(LogMoments { count: logs.len(), mean_log_over_h: mean / hf, sd_log_over_sqrt_h: var.sqrt() / hf.sqrt() })
}

/// Statistics of the primes at height h; `with_all` adds the same pair for every element.
pub fn level_stats<N: Natural>(s: &HeightStructure<N>, h: usize, with_all: bool) -> Result<LevelStats, StatsError> {
    let level = s.level(h)?;
    let primes = log_moments(&level.primes, h).ok_or(StatsError::EmptyPrimeLevel { h })?;
    let all = if with_all { log_moments(&level.elements, h) } else { None };
    Ok(LevelStats { h, count: level.count(), prime_count: level.prime_count(), primes, all })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Series {
    All,
    Primes,
    SophieGermain,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Series::All => "all",
            Series::Primes => "primes",
            Series::SophieGermain => "sophie_germain",
        })
    }
}

impl FromStr for Series {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "all" => Ok(Series::All),
            "primes" => Ok(Series::Primes),
            "sophie_germain" | "sg" => Ok(Series::SophieGermain),
            other => Err(StatsError::InvalidParameter(format!("series `{other}`"))),
        }
    }
}

/// Counts per half-open bin `[origin + k·w, origin + (k+1)·w)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    pub h: usize,
    pub origin: BigUint,
    pub bin_width: u64,
    pub series: Series,
    pub bins: Vec<u64>,
    /// Values below the origin.
    pub below_origin: u64,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.bins.iter().sum()
    }

    pub fn bin_start(&self, k: usize) -> BigUint {
        &self.origin + BigUint::from(self.bin_width) * k
    }
}

pub const DEFAULT_BIN_WIDTH: u64 = 25_000;
/// Refuse histograms with more bins than this.
pub const MAX_BINS: u64 = 50_000_000;

/// Histogram of one series at height h. The origin defaults to the smallest
/// element of the level (2^h for Shapiro).
pub fn histogram<N: Natural>(
    s: &HeightStructure<N>,
    h: usize,
    bin_width: u64,
    series: Series,
    origin: Option<BigUint>,
) -> Result<Histogram, StatsError> {
    if bin_width == 0 {
        return Err(StatsError::InvalidParameter("bin width must be positive".into()));
    }
    let level = s.level(h)?;
    let values: Vec<N> = match series {
        Series::All => level.elements.clone(),
        Series::Primes => level.primes.clone(),
        Series::SophieGermain => sophie_germain(s, h)?,
    };
    let origin = origin.unwrap_or_else(|| level.min().map(Natural::to_biguint).unwrap_or_default());
    let width = BigUint::from(bin_width);
    let mut bins: Vec<u64> = Vec::new();
    let mut below = 0;
    for v in &values {
        let v = v.to_biguint();
        if v < origin {
            below += 1;
            continue;
        }
        let k = ((v - &origin) / &width).to_u64().filter(|&k| k < MAX_BINS).ok_or(StatsError::TooManyBins { limit: MAX_BINS })?;
        let k = k as usize;
        if bins.len() <= k {
            bins.resize(k + 1, 0);
        }
        bins[k] += 1;
    }
    Ok(Histogram { h, origin, bin_width, series, bins, below_origin: below })
}

/// Primes p at height h with 2p + 1 prime. When height h + 1 is materialized,
/// each 2p + 1 is also confirmed to sit there.
pub fn sophie_germain<N: Natural>(s: &HeightStructure<N>, h: usize) -> Result<Vec<N>, StatsError> {
    let level = s.level(h)?;
    // H(2p+1) = H(2p) = H(p) + 1 only under the plain (2, +1) successor rule
    let shifts = !s.rule().is_squarefree() && s.rule().kind == RuleKind::SuccessorRecursive { multiplier: 2, offset: 1 };
    let next = s.level(h + 1).ok().filter(|_| shifts);
    let two = N::from_word(2);
    let mut out = Vec::new();
    for p in &level.primes {
        let safe = p.checked_mul(&two).and_then(|d| d.checked_add(&N::one()));
        let Some(safe) = safe else { continue };
        if !safe.is_prime() {
            continue;
        }
        if let Some(next) = next {
            if !next.contains(&safe) {
                return Err(StatsError::HeightShift { p: p.to_string(), h });
            }
        }
        out.push(p.clone());
    }
    Ok(out)
}
