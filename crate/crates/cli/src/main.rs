//! Command-line front end: data synthesis, training, generation,
//! evaluation, noise studies and runtime estimates.

mod commands;

use std::process::ExitCode;

use clap::Parser;

use commands::{Cli, CliError};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            return fail(&CliError::Usage(flatten_clap(&e.to_string())));
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

/// Clap's multi-line report without the usage and help hints.
fn flatten_clap(s: &str) -> String {
    s.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with("Usage:") && !l.starts_with("For more information"))
        .collect::<Vec<_>>()
        .join(" ")
        .trim_start_matches("error: ")
        .to_string()
}

fn fail(e: &CliError) -> ExitCode {
    let msg = e.to_string().split_whitespace().collect::<Vec<_>>().join(" ");
    eprintln!("error: {msg}");
    ExitCode::from(e.exit_code())
}
