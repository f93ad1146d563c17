//! Experiment runner: JSON configs in, CSV tables, SVG plots and JSON reports out.

pub mod config;
pub mod error;
pub mod experiments;
pub mod plot;
pub mod report;
pub mod runner;
pub mod table;

pub use config::ExperimentConfig;
pub use error::{LabError, LabResult};
pub use experiments::{find, registry, Experiment};
pub use report::Report;
pub use runner::{default_out_dir, rerender, run_experiment};
