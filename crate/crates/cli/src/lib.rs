//! Command-line front end: configuration, orchestration and reports.

pub mod config;
pub mod report;
pub mod run;

pub use config::{Command, ConfigError, Format, RunConfig};
pub use report::Report;
pub use run::{run, Outcome, RunError};
