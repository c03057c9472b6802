//! `qxor`: analysis, simulation and verification front end.

mod commands;
mod input;
mod output;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{analyze, oracle, run, serve, sweep};

/// Bad flag values detected after parsing; exits with status 2 like clap's
/// own usage errors.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser, Debug)]
#[command(name = "qxor", version, about = "Simulate and verify the Fourier-sampling protocol for XOR functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Degree, Fourier norms and communication bound of a function.
    Analyze(analyze::AnalyzeArgs),
    /// One protocol execution (majority over --reps runs) on inputs x, y.
    Run(run::RunArgs),
    /// Exact or sampled error probability for every z = x ⊕ y.
    Oracle(oracle::OracleArgs),
    /// Analyze and verify every function file in a directory.
    Sweep(sweep::SweepArgs),
    /// One endpoint of a networked run.
    Serve(serve::ServeArgs),
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<qxor_core::Error>() {
        Some(
            qxor_core::Error::Precondition(_)
            | qxor_core::Error::ArityMismatch { .. }
            | qxor_core::Error::SampleOverflow(_)
            | qxor_core::Error::OracleLimit(_),
        ) => 3,
        Some(qxor_core::Error::Parse(_) | qxor_core::Error::TableLength { .. } | qxor_core::Error::NotSign(_)) => 4,
        Some(qxor_core::Error::Wire(_)) => 5,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => analyze::run(a),
        Command::Run(a) => run::run(a),
        Command::Oracle(a) => oracle::run(a),
        Command::Sweep(a) => sweep::run(a),
        Command::Serve(a) => serve::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
