//! Experiment runner: configuration, sweeps and CSV reports.

pub mod config;
pub mod error;
pub mod figures;
pub mod report;

pub use config::{validate_config, ExperimentConfig, Mode};
pub use error::HarnessError;
pub use report::SweepReport;
