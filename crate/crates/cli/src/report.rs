use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use conductor_core::analysis::{cost_curve, eval_examples, preference_row, record_baseline, tool_usage};
use conductor_core::env_sim::EnvBundle;
use conductor_core::rewards::{outcome_reward, BaselineStore, NormalizedExactMatch};
use conductor_core::rollout::read_trajectories;
use conductor_core::Trajectory;
use serde::Serialize;

use crate::common::print_summary;
use crate::error::CliError;
use crate::manifest::RunManifest;

#[derive(Args, Debug, Serialize)]
pub struct ReportArgs {
    /// Bundle the logs were produced on.
    #[arg(long)]
    pub bundle: PathBuf,
    /// Trajectory logs, as `PATH` or `LABEL=PATH`.
    #[arg(required = true)]
    pub logs: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
    /// Baseline store for preference scores. Without it, the first log is the baseline.
    #[arg(long, requires = "baseline_label")]
    pub baseline_store: Option<PathBuf>,
    #[arg(long)]
    pub baseline_label: Option<String>,
    #[arg(long, default_value = "pref-eval")]
    pub benchmark: String,
    #[arg(long)]
    #[serde(skip)]
    pub json: bool,
}

#[derive(Debug, Serialize)]
struct ReportSummary {
    logs: usize,
    trajectories: usize,
    tools: usize,
}

fn parse_log(spec: &str) -> (String, PathBuf) {
    match spec.split_once('=') {
        Some((label, path)) => (label.to_string(), PathBuf::from(path)),
        None => {
            let path = PathBuf::from(spec);
            let label = path
                .parent()
                .and_then(Path::file_name)
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| spec.to_string());
            (label, path)
        }
    }
}

pub fn run(args: &ReportArgs) -> Result<(), CliError> {
    let bundle = EnvBundle::load(&args.bundle)?;
    let tools = bundle.catalog.names();
    let mut logs: Vec<(String, Vec<Trajectory>)> = Vec::new();
    for spec in &args.logs {
        let (label, path) = parse_log(spec);
        let mut trajs = read_trajectories(&path)?;
        if trajs.is_empty() {
            return Err(CliError::Config(format!("log `{}` is empty", path.display())));
        }
        for t in &mut trajs {
            if t.outcome.is_none() {
                let task = bundle
                    .tasks
                    .iter()
                    .find(|x| x.task_id == t.task_id)
                    .ok_or_else(|| CliError::Env(format!("log names unknown task `{}`", t.task_id)))?;
                t.outcome = Some(outcome_reward(task, t, &bundle.catalog, &NormalizedExactMatch)?.outcome);
            }
        }
        logs.push((label, trajs));
    }

    fs::create_dir_all(&args.out)?;
    let mut usage = csv::Writer::from_path(args.out.join("tool_usage.csv"))?;
    usage.write_record(["label", "tool", "mean_calls", "share"])?;
    for (label, trajs) in &logs {
        for row in tool_usage(trajs, &tools)? {
            usage.write_record([label.clone(), row.tool, row.mean_calls.to_string(), row.share.to_string()])?;
        }
    }
    usage.flush()?;

    let mut curve = csv::Writer::from_path(args.out.join("cost_curve.csv"))?;
    for point in cost_curve(&logs) {
        curve.serialize(point)?;
    }
    curve.flush()?;

    let (store, baseline) = match (&args.baseline_store, &args.baseline_label) {
        (Some(path), Some(label)) => (BaselineStore::load(path)?, label.clone()),
        _ => {
            let (label, trajs) = &logs[0];
            let mut store = BaselineStore::default();
            record_baseline(&mut store, &args.benchmark, label, &eval_examples(trajs, &bundle.tasks, &bundle.catalog)?);
            (store, label.clone())
        }
    };
    let mut prefs = csv::Writer::from_path(args.out.join("preference_scores.csv"))?;
    for (label, trajs) in &logs {
        let examples = eval_examples(trajs, &bundle.tasks, &bundle.catalog)?;
        prefs.serialize(preference_row(label, &examples, &store, &args.benchmark, &baseline)?)?;
    }
    prefs.flush()?;

    let mut inputs = vec![args.bundle.clone()];
    inputs.extend(args.logs.iter().map(|s| parse_log(s).1));
    inputs.extend(args.baseline_store.clone());
    let refs: Vec<&Path> = inputs.iter().map(|p| p.as_path()).collect();
    RunManifest::new("report", serde_json::to_value(args)?, &refs, 0, &args.out)?.write(&args.out)?;
    print_summary(
        &ReportSummary {
            logs: logs.len(),
            trajectories: logs.iter().map(|(_, t)| t.len()).sum(),
            tools: tools.len(),
        },
        args.json,
    )
}
