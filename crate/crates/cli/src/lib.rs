//! Command-line front end: kernel specs, test-function expressions and the
//! `sonin` command tree.

pub mod app;
pub mod expr;
pub mod kernel_spec;

pub use app::{run, Cli, CliError};
