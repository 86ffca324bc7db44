use std::path::PathBuf;

use clap::Args;
use conductor_core::env_sim::{verify, write_jsonl, EnvBundle};
use conductor_core::rollout::read_trajectories;
use serde::Serialize;

use crate::common::print_summary;
use crate::error::CliError;

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub bundle: PathBuf,
    #[arg(long)]
    pub trajectories: PathBuf,
    /// Write one verification report per trajectory here.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Serialize)]
struct VerifySummary {
    trajectories: usize,
    solved: usize,
    execution_correct: usize,
    fidelity: usize,
    complete: usize,
}

pub fn run(args: &VerifyArgs) -> Result<(), CliError> {
    let bundle = EnvBundle::load(&args.bundle)?;
    let trajs = read_trajectories(&args.trajectories)?;
    let mut reports = Vec::with_capacity(trajs.len());
    for t in &trajs {
        let task = bundle
            .tasks
            .iter()
            .find(|x| x.task_id == t.task_id)
            .ok_or_else(|| CliError::Env(format!("unknown task `{}`", t.task_id)))?;
        reports.push(verify(task, t, &bundle.catalog)?);
    }
    if let Some(path) = &args.out {
        write_jsonl(path, &reports)?;
    }
    let count = |f: fn(&conductor_core::VerificationReport) -> bool| reports.iter().filter(|r| f(r)).count();
    print_summary(
        &VerifySummary {
            trajectories: reports.len(),
            solved: count(|r| r.solved),
            execution_correct: count(|r| r.execution_correctness),
            fidelity: count(|r| r.process_fidelity),
            complete: count(|r| r.operation_completeness),
        },
        args.json,
    )
}
