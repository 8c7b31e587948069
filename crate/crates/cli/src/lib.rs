//! Batch front-end for the `diracspec` library: reads an experiment config,
//! runs one task and writes CSV/JSON artifacts with a run manifest.

pub mod app;
pub mod config;
pub mod output;

use diracspec::DiracError;
use thiserror::Error;

pub use app::{run, RunSummary};
pub use config::{ExperimentConfig, Task};

#[derive(Debug, Error)]
pub enum Failure {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] DiracError),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Numerical(_) => 2,
            Self::Io(_) => 3,
        }
    }
}

pub const THREADS_ENV: &str = "DIRACSPEC_THREADS";

/// Reads the thread count from the environment; `None` leaves rayon's default.
pub fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(Failure::Config(format!("{THREADS_ENV}: {e}"))),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Failure::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}
