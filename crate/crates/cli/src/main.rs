use std::process::ExitCode;

use clap::Parser;
use weakpdc_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match weakpdc_cli::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit()
        }
    }
}
