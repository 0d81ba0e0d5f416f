//! `privdiffuse`: sample traces, compute distances, diffuse private data
//! over networks, run scenarios and the verification suite.
//!
//! Exit status: 0 on success, 1 when a verification check fails, 2 on a
//! usage or validation error.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// Bad input: flags, files or parameters.
    Usage(anyhow::Error),
    /// The command ran but a check it performs failed.
    Check(String),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => commands::sample(a),
        Command::Distances(a) => commands::distances(a),
        Command::Diffuse(a) => commands::diffuse(a),
        Command::Simulate(a) => commands::simulate(a),
        Command::Verify(a) => commands::verify(a),
        Command::GenNetwork(a) => commands::gen_network(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
