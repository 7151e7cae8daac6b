//! Config-driven runner for the `tqw` command line tool.

pub mod config;
pub mod error;
pub mod manifest;
pub mod run;
pub mod validate;

pub use config::{ExperimentConfig, Kind};
pub use error::CliError;
pub use manifest::RunManifest;
pub use run::{run, RunOptions};
pub use validate::{validate, Diagnostic, Level};
