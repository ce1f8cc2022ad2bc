//! Files, command line and parallel scheduling on top of `ppoints-core`.
//!
//! Every output is a pure function of the config and the seed: numeric text
//! is rounded to 12 significant digits, parallel work is keyed by index, and
//! files are written once through a temporary file.

pub mod cli;
pub mod config;
mod error;
pub mod files;
pub mod format;
pub mod parallel;
pub mod report;
pub mod tasks;

pub use config::{LoadedConfig, ScenarioConfig, Task};
pub use error::CliError;
pub use tasks::{run, Outcome, RunOptions};
