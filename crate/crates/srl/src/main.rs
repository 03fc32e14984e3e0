use std::process::ExitCode;

use clap::Parser;
use srl::cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = srl::configure_threads().and_then(|()| srl::commands::run(cli.command));
    match outcome {
        Ok(status) => ExitCode::from(srl::status_code(status)),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(srl::error_code(&e))
        }
    }
}
