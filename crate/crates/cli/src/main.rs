//! `nccause`: reproducible certificates for the lattice EPR-Bohm scenario.
//!
//! Exit codes: 0 success or verification pass, 1 verification failure,
//! 2 usage or configuration error.

mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use crate::config::Cli;

/// Failure modes mapped onto exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Verification,
}

impl From<nccause_core::Error> for CliError {
    fn from(e: nccause_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Verification) => ExitCode::from(1),
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
