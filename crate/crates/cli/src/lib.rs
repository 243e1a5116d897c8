//! Command-line front end for the `colheat` library: parameter sweeps,
//! figure data, trajectories and a physical-unit report, written as CSV or
//! JSON.

mod app;
pub mod args;
pub mod dynamics;
mod error;
pub mod figures;
pub mod si;
pub mod sweep;
pub mod table;

pub use app::{expand_config, main_with_args, run, Cli, Command, VERSION};
pub use error::{CliError, CliResult, EXIT_NUMERIC, EXIT_USAGE};
