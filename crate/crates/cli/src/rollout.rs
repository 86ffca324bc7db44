use std::fs;
use std::path::PathBuf;

use clap::Args;
use conductor_core::grpo::{default_preference, group_advantages};
use conductor_core::rewards::{metric_vector, outcome_reward, score_batch, BatchReport, NormalizedExactMatch, RewardInput, CENTS_PER_DOLLAR};
use conductor_core::rollout::{run_episode, run_group, write_trajectories};
use conductor_core::seed::hash_seed;
use conductor_core::{RolloutConfig, TaskSpec, ToolCatalog, Trajectory};
use serde::Serialize;

use crate::common::{flag_inputs, load_bundle, parse_policy, policy_input, print_summary, select_split, RunFlags, SplitArg};
use crate::error::CliError;
use crate::manifest::{write_json, RunManifest};

#[derive(Args, Debug, Serialize)]
pub struct RolloutArgs {
    #[arg(long)]
    pub bundle: PathBuf,
    /// golden, never, idle, toy or toy:CHECKPOINT
    #[arg(long, default_value = "golden")]
    pub policy: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    pub split: SplitArg,
    #[command(flatten)]
    pub run: RunFlags,
}

#[derive(Debug, Serialize)]
pub struct RolloutSummary {
    pub tasks: usize,
    pub trajectories: usize,
    pub solve_rate: f64,
    pub mean_cost_cents: f64,
    pub mean_latency_s: f64,
}

#[derive(Debug, Serialize)]
struct GroupRewards {
    task_id: String,
    #[serde(flatten)]
    report: BatchReport,
}

#[derive(Debug, Serialize)]
struct RewardsFile {
    group_size: usize,
    groups: Vec<GroupRewards>,
}

/// Runs `group_size` episodes per task (one when the size is 1) with per-task
/// seeds, and records each trajectory's outcome.
pub fn collect(
    policy: &dyn conductor_core::Policy,
    tasks: &[TaskSpec],
    catalog: &ToolCatalog,
    flags: &RunFlags,
) -> Result<Vec<Vec<Trajectory>>, CliError> {
    if flags.group_size == 0 {
        return Err(CliError::Config("group size must be positive".into()));
    }
    let mut groups = Vec::with_capacity(tasks.len());
    for task in tasks {
        let cfg = RolloutConfig::default()
            .with_seed(hash_seed(flags.seed, task.task_id.as_bytes()))
            .with_max_turns(flags.max_turns);
        let mut group = if flags.group_size == 1 {
            vec![run_episode(policy, task, catalog, &cfg)?]
        } else {
            run_group(policy, task, catalog, &cfg, flags.group_size)?
        };
        for traj in &mut group {
            traj.outcome = Some(outcome_reward(task, traj, catalog, &NormalizedExactMatch)?.outcome);
        }
        groups.push(group);
    }
    Ok(groups)
}

fn score(tasks: &[TaskSpec], groups: &[Vec<Trajectory>], catalog: &ToolCatalog) -> Result<Vec<GroupRewards>, CliError> {
    let prefs: Vec<Vec<f64>> = tasks.iter().map(|t| default_preference(t, catalog.len())).collect();
    let mut out = Vec::new();
    let batch = |members: &[(usize, &Trajectory)]| -> Result<BatchReport, CliError> {
        let inputs = members
            .iter()
            .map(|(t, traj)| {
                Ok(RewardInput {
                    task_id: &traj.task_id,
                    raw: metric_vector(traj, catalog, traj.outcome == Some(true))?,
                    preference: &prefs[*t],
                    outcome: traj.outcome == Some(true),
                })
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        Ok(score_batch(&inputs)?)
    };
    if groups.iter().all(|g| g.len() >= 2) {
        for (t, group) in groups.iter().enumerate() {
            let members: Vec<(usize, &Trajectory)> = group.iter().map(|g| (t, g)).collect();
            let mut report = batch(&members)?;
            let rewards: Vec<f64> = report.entries.iter().map(|e| e.final_reward).collect();
            let adv = group_advantages(&rewards)?;
            for (e, a) in report.entries.iter_mut().zip(adv.advantages) {
                e.advantage = Some(a);
            }
            out.push(GroupRewards {
                task_id: tasks[t].task_id.clone(),
                report,
            });
        }
    } else {
        let members: Vec<(usize, &Trajectory)> = groups
            .iter()
            .enumerate()
            .flat_map(|(t, g)| g.iter().map(move |x| (t, x)))
            .collect();
        if members.len() >= 2 {
            out.push(GroupRewards {
                task_id: "*".into(),
                report: batch(&members)?,
            });
        }
    }
    Ok(out)
}

pub fn summarize(tasks: usize, trajectories: &[Trajectory]) -> RolloutSummary {
    let n = trajectories.len().max(1) as f64;
    RolloutSummary {
        tasks,
        trajectories: trajectories.len(),
        solve_rate: trajectories.iter().filter(|t| t.outcome == Some(true)).count() as f64 / n,
        mean_cost_cents: trajectories.iter().map(|t| t.totals.cost).sum::<f64>() * CENTS_PER_DOLLAR / n,
        mean_latency_s: trajectories.iter().map(|t| t.totals.latency).sum::<f64>() / n,
    }
}

pub fn run(args: &RolloutArgs) -> Result<(), CliError> {
    let bundle = load_bundle(&args.bundle, &args.run)?;
    let policy = parse_policy(&args.policy, &bundle.catalog)?;
    let tasks = select_split(&bundle, args.split);
    if tasks.is_empty() {
        return Err(CliError::Env("no tasks in the selected split".into()));
    }
    let groups = collect(policy.as_ref(), &tasks, &bundle.catalog, &args.run)?;
    let rewards = RewardsFile {
        group_size: args.run.group_size,
        groups: score(&tasks, &groups, &bundle.catalog)?,
    };
    let flat: Vec<Trajectory> = groups.into_iter().flatten().collect();

    fs::create_dir_all(&args.out)?;
    write_trajectories(&args.out.join("trajectories.jsonl"), &flat)?;
    write_json(&args.out.join("rewards.json"), &rewards)?;
    let summary = summarize(tasks.len(), &flat);
    write_json(&args.out.join("summary.json"), &summary)?;

    let mut inputs = vec![args.bundle.clone()];
    inputs.extend(flag_inputs(&args.run));
    inputs.extend(policy_input(&args.policy));
    let refs: Vec<&std::path::Path> = inputs.iter().map(|p| p.as_path()).collect();
    RunManifest::new("rollout", serde_json::to_value(args)?, &refs, args.run.seed, &args.out)?.write(&args.out)?;
    print_summary(&summary, args.run.json)
}
