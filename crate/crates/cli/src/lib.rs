//! Library side of the `xpol-dm` command-line tool.

pub mod commands;
pub mod config;
pub mod error;

pub use error::CliError;
