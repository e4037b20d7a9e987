//! Command-line front end: config resolution, sweeps and report writing.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use args::{Cli, Command};
use error::CliResult;

pub fn dispatch(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Run(a) => commands::run(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Invert(a) => commands::invert(a),
        Command::Check(a) => commands::check(a),
    }
}
