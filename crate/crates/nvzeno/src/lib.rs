//! Sweeps, figure tables, file formats and the command-line front end for
//! [`nvzeno_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod sweep;
pub mod validate;

pub use error::{CliError, CliResult};
pub use nvzeno_core as core;
