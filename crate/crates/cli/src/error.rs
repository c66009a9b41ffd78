use std::io;

use heightlab::bounds::BoundsError;
use heightlab::checkpoint::CheckpointError;
use heightlab::matula::MatulaError;
use heightlab::primality::PrimeError;
use heightlab::stats::StatsError;
use heightlab::{EnumError, RuleError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Mismatch(String),
    #[error("{0}")]
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Mismatch(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl CliError {
    pub fn with_context(self, note: String) -> Self {
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{m} ({note})")),
            CliError::Mismatch(m) => CliError::Mismatch(format!("{m} ({note})")),
            CliError::Resource(m) => CliError::Resource(format!("{m} ({note})")),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Resource(format!("i/o: {e}"))
    }
}

impl From<PrimeError> for CliError {
    fn from(e: PrimeError) -> Self {
        match e {
            PrimeError::LimitTooSmall { .. } | PrimeError::ZeroIndex => CliError::Usage(e.to_string()),
            _ => CliError::Resource(e.to_string()),
        }
    }
}

impl From<RuleError> for CliError {
    fn from(e: RuleError) -> Self {
        match e {
            RuleError::UnknownRule(_) | RuleError::InvalidParameter(_) => CliError::Usage(e.to_string()),
            RuleError::Prime(p) => p.into(),
            _ => CliError::Resource(e.to_string()),
        }
    }
}

impl From<EnumError> for CliError {
    fn from(e: EnumError) -> Self {
        match e {
            EnumError::Rule(r) => r.into(),
            EnumError::NotMaterialized { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Resource(e.to_string()),
        }
    }
}

impl From<CheckpointError> for CliError {
    fn from(e: CheckpointError) -> Self {
        match e {
            CheckpointError::Io(io) => io.into(),
            CheckpointError::Rule(r) => r.into(),
            _ => CliError::Usage(format!("checkpoint: {e}")),
        }
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        match e {
            StatsError::Enum(x) => x.into(),
            StatsError::Rule(x) => x.into(),
            StatsError::TooManyBins { .. } | StatsError::Budget(_) => CliError::Resource(e.to_string()),
            StatsError::HeightShift { .. } => CliError::Mismatch(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<MatulaError> for CliError {
    fn from(e: MatulaError) -> Self {
        match e {
            MatulaError::Zero | MatulaError::Parse { .. } => CliError::Usage(e.to_string()),
            MatulaError::Prime(p) => p.into(),
            MatulaError::Overflow => CliError::Resource(e.to_string()),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::Prime(p) => p.into(),
            _ => CliError::Usage(e.to_string()),
        }
    }
}
