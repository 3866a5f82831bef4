//! Experiment suites, configuration and CSV reporting on top of `translab`.

pub mod builtins;
pub mod calibration;
pub mod config;
pub mod experiments;
pub mod random;
pub mod report;
pub mod suite;

pub use calibration::{Calibration, CalibrationKey};
pub use config::{ConfigError, ConfigFile, ExperimentConfig};
pub use experiments::run_experiment;
pub use report::{Check, ReportRow};
pub use suite::{suite_all, SuiteSummary};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] translab::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl From<String> for HarnessError {
    fn from(msg: String) -> Self {
        Self::Config(ConfigError::general(msg))
    }
}
