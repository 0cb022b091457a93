//! Command-line driver for `wqed-core`: scenario files, sweep drivers,
//! CSV/JSON tables with gnuplot scripts, and seeded Monte-Carlo fits.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3
//! numerical error.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod montecarlo;
pub mod table;

pub use error::{CliError, Result};
