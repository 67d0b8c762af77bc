//! `semfeat`: semantic feature extraction, invariance checks, synthetic data,
//! training and evaluation.
//!
//! Exit status: 0 on success, 1 on validation or configuration errors, 2 when
//! a tolerance or throughput assertion fails.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// A measured quantity fell outside its tolerance.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct ToleranceFailure(pub String);

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(threads) = cli.threads {
        anyhow::ensure!(threads > 0, "--threads must be at least 1");
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()?;
    }
    match cli.command {
        Command::Synth(a) => commands::synth::run(a),
        Command::Extract(a) => commands::extract::run(a),
        Command::Invariance(a) => commands::invariance::run(a),
        Command::Bench(a) => commands::bench::run(a),
        Command::Train(a) => commands::learn::train(a),
        Command::Eval(a) => commands::learn::eval(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<ToleranceFailure>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
