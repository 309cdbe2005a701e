use std::process::ExitCode;

use clap::Parser;
use dopgolay_cli::Cli;

fn main() -> ExitCode {
    dopgolay_cli::run(&Cli::parse())
}
