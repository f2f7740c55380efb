mod args;
mod commands;
mod render;

use std::fmt;
use std::process::ExitCode;

use clap::Parser;
use zerosum_core::Error;

use args::{Cli, Command};

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Invalid(String),
    Mismatch(String),
    Budget(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) => 1,
            CliError::Mismatch(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) | CliError::Mismatch(m) | CliError::Budget(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExhausted { .. } => CliError::Budget(e.to_string()),
            Error::DerivationFailed(_) => CliError::Mismatch(e.to_string()),
            Error::InvalidInput(_) | Error::NotSmooth { .. } | Error::Io(_) => CliError::Invalid(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Exact(a) => commands::exact(a),
        Command::Bounds(a) => commands::bounds(a),
        Command::DeriveA3(a) => commands::derive_a3(a),
        Command::MainBound(a) => commands::main_bound(a),
        Command::Smooth(a) => commands::smooth(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::VerifyPaper(a) => commands::verify_paper(a),
    };
    match result {
        Ok(out) => {
            print!("{}", out.table.render(cli.format));
            match out.failure {
                Some(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(e.exit_code())
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
