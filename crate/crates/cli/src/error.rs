use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] kpo_core::Error),
}

impl CliError {
    /// 2 for configuration and domain errors, 3 for I/O, 4 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        use kpo_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Read { .. } | CliError::Write { .. } => 3,
            CliError::Core(e) => match e {
                E::Divergence { .. } | E::FitWindow { .. } | E::NonPositiveSignal { .. } | E::NonPositiveRate(_) => 4,
                E::DimensionMismatch { .. }
                | E::Truncation { .. }
                | E::StepSize { .. }
                | E::Window { .. }
                | E::WindowTooLong { .. }
                | E::Domain(_)
                | E::InvalidState(_) => 2,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
