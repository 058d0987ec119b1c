//! Experiment runner for `rgsde-core`: TOML configs, CSV tables, a JSON
//! manifest and a thread-pool executor.

pub mod config;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod gallery;
pub mod output;
pub mod run;
pub mod setup;

pub use error::RunError;
pub use run::{run, Experiment, RunOptions, RunOutcome};
