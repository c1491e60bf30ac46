//! Command-line front end: configuration, region sampling, orchestration of
//! the checks and deterministic report emission.

pub mod args;
pub mod canonical;
pub mod catalog;
pub mod config;
pub mod error;
pub mod report;
pub mod run;
pub mod sampling;

pub use error::{CliError, CliResult};
pub use report::{AggregateVerdict, ReportDocument};
pub use run::{execute, Outcome};
