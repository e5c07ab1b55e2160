use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = specunet::cli::Cli::parse();
    match specunet::cli::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
