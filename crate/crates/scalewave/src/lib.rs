//! Command-line front end, file formats and experiment plumbing for
//! `scalewave-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod reports;

pub use config::Config;
pub use error::{CliError, Result};
