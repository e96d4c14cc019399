//! Experiment runner for the `hypwalk` library: config parsing, the five
//! bundled experiments and their reports.

pub mod catalog;
pub mod config;
pub mod experiments;
pub mod report;

pub use catalog::{ExperimentId, CATALOG};
pub use config::{Config, ConfigError};
pub use experiments::{run_config, run_estimates};
pub use report::Report;
