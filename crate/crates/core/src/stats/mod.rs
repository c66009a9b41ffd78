//! Statistics over height structures: log moments per level, histograms,
//! Sophie Germain primes, the lognormal prime-count estimator and average
//! orders.

mod erf;
mod estimator;
mod growth;
mod levels;

use thiserror::Error;

use crate::enumeration::EnumError;
use crate::rules::RuleError;

pub use erf::{erf, erfc};
pub use estimator::{
    pi_compare_table, pi_hat, reference_at, table_xs, EstimatorParams, HeightCap, PiCompareRow, PiHat, PiSource,
    PI_HAT_REFERENCE, PI_REFERENCE, X_OVER_LN_REFERENCE,
};
pub use growth::{avg_order, avg_order_with_cap, average_order_trend, growth_report, AverageOrderRow, GrowthRow, Normalizer};
pub use levels::{
    histogram, level_stats, log_moments, sophie_germain, Histogram, LevelStats, LogMoments, Series, DEFAULT_BIN_WIDTH,
    MAX_BINS,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StatsError {
    #[error("height {h} has no primes")]
    EmptyPrimeLevel { h: usize },
    #[error("{0}")]
    InvalidParameter(String),
    #[error("histogram would need more than {limit} bins")]
    TooManyBins { limit: u64 },
    #[error("2·{p}+1 is prime but not at height {}", h + 1)]
    HeightShift { p: String, h: usize },
    #[error("resource limit: {0}")]
    Budget(String),
    #[error(transparent)]
    Enum(#[from] EnumError),
    #[error(transparent)]
    Rule(#[from] RuleError),
}
