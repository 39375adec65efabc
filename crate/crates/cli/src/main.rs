use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    ExitCode::from(subsum_cli::run(subsum_cli::Cli::parse()))
}
