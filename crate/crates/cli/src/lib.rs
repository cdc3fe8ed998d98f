//! Command-line front end for `tqe-core`: reports, probability tables,
//! optimizations, figure sweeps, simulation cross-checks and self-checks,
//! written as CSV or JSON.

pub mod checks;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::run;
pub use config::{Format, RunConfig};
pub use error::CliError;
