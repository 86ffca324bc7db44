//! `conductor`: synthesize environments, run rollouts, train the toy policy
//! and report on trajectory logs.
//!
//! Exit codes: 0 success, 1 i/o error, 2 configuration error, 3 environment
//! error, 4 training stalled with every group filtered.

mod common;
mod error;
mod eval_pref;
mod manifest;
mod report;
mod rollout;
mod synth;
mod train;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliError;

#[derive(Parser, Debug)]
#[command(name = "conductor", version, about = "Cost- and preference-aware tool orchestration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a policy over a bundle and score the trajectories.
    Rollout(rollout::RolloutArgs),
    /// Train the toy policy with group-relative policy optimization.
    Train(train::TrainArgs),
    /// Synthesize an environment bundle.
    Synth(synth::SynthArgs),
    /// Write tool usage, cost curve and preference score tables.
    Report(report::ReportArgs),
    /// Verify stored trajectories against their tasks.
    Verify(verify::VerifyArgs),
    /// Record or score preference-aware evaluation vectors.
    EvalPref(eval_pref::EvalPrefArgs),
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Rollout(a) => rollout::run(a),
        Command::Train(a) => train::run(a),
        Command::Synth(a) => synth::run(a),
        Command::Report(a) => report::run(a),
        Command::Verify(a) => verify::run(a),
        Command::EvalPref(a) => eval_pref::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
