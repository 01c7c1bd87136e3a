use std::path::PathBuf;

use satrrm::beam_hopping::BhError;
use satrrm::carrier_power::SolverError;
use thiserror::Error;

pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_GUARD_RAIL: u8 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    GuardRail(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::GuardRail(_) => EXIT_GUARD_RAIL,
            _ => EXIT_VALIDATION,
        }
    }

    pub fn validation(context: &str, err: impl std::fmt::Display) -> Self {
        Self::Validation(format!("{context}: {err}"))
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        if e.is_guard_rail() {
            Self::GuardRail(e.to_string())
        } else {
            Self::validation("solver", e)
        }
    }
}

impl From<BhError> for CliError {
    fn from(e: BhError) -> Self {
        if e.is_guard_rail() {
            Self::GuardRail(e.to_string())
        } else {
            Self::validation("beam hopping", e)
        }
    }
}
