//! File formats, report rendering and subcommands of the `costeff` binary.

pub mod cli;
pub mod commands;
pub mod error;
pub mod format;
pub mod io;
pub mod mc;

pub use cli::{run, Cli, Command};
pub use error::CliError;
