//! Command-line harness around `mclm-core`: configuration files, runs with
//! manifest and series output, verification suites and convergence studies.

pub mod config;
pub mod manifest;
pub mod run;
pub mod verify;

pub use config::{FormulationName, RunConfig, OUTPUT_ROOT_ENV};
pub use manifest::{RunManifest, SeriesRow, Summary};
pub use run::{convergence, cross_validation, run, RunOutcome, EXIT_BLOWUP, EXIT_ERROR, EXIT_OK};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}
