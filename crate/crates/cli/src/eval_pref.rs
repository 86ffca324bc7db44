use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use conductor_core::analysis::{eval_examples, preference_row, record_baseline};
use conductor_core::rewards::BaselineStore;
use conductor_core::rollout::write_trajectories;
use serde::Serialize;

use crate::common::{flag_inputs, load_bundle, parse_policy, policy_input, print_summary, select_split, RunFlags, SplitArg};
use crate::error::CliError;
use crate::manifest::{write_json, RunManifest};
use crate::rollout::collect;

#[derive(Args, Debug, Serialize)]
pub struct EvalPrefArgs {
    #[arg(long)]
    pub bundle: PathBuf,
    #[arg(long, default_value = "toy")]
    pub policy: String,
    /// Baseline store (JSONL).
    #[arg(long)]
    pub store: PathBuf,
    /// Record this run's vectors into the store under this label instead of scoring.
    #[arg(long, conflicts_with = "baseline")]
    pub record: Option<String>,
    /// Score against the vectors stored under this label.
    #[arg(long, required_unless_present = "record")]
    pub baseline: Option<String>,
    /// Label of the scored policy in the output.
    #[arg(long, default_value = "policy")]
    pub label: String,
    #[arg(long, default_value = "pref-eval")]
    pub benchmark: String,
    #[arg(long, value_enum, default_value = "eval")]
    pub split: SplitArg,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub run: RunFlags,
}

pub fn run(args: &EvalPrefArgs) -> Result<(), CliError> {
    let bundle = load_bundle(&args.bundle, &args.run)?;
    let policy = parse_policy(&args.policy, &bundle.catalog)?;
    let tasks = select_split(&bundle, args.split);
    if tasks.is_empty() {
        return Err(CliError::Env("no tasks in the selected split".into()));
    }
    let flags = RunFlags {
        group_size: 1,
        ..args.run.clone()
    };
    let trajs: Vec<_> = collect(policy.as_ref(), &tasks, &bundle.catalog, &flags)?
        .into_iter()
        .flatten()
        .collect();
    let examples = eval_examples(&trajs, &tasks, &bundle.catalog)?;
    if examples.is_empty() {
        return Err(CliError::Env("no task in the split carries a preference".into()));
    }

    fs::create_dir_all(&args.out)?;
    write_trajectories(&args.out.join("trajectories.jsonl"), &trajs)?;
    let mut inputs: Vec<PathBuf> = vec![args.bundle.clone()];
    inputs.extend(flag_inputs(&args.run));
    inputs.extend(policy_input(&args.policy));
    if args.store.exists() {
        inputs.push(args.store.clone());
    }
    let refs: Vec<&Path> = inputs.iter().map(|p| p.as_path()).collect();
    let manifest = RunManifest::new("eval-pref", serde_json::to_value(args)?, &refs, args.run.seed, &args.out)?;

    let mut store = if args.store.exists() {
        BaselineStore::load(&args.store)?
    } else {
        BaselineStore::default()
    };
    if let Some(label) = &args.record {
        record_baseline(&mut store, &args.benchmark, label, &examples);
        store.save(&args.store)?;
        manifest.write(&args.out)?;
        #[derive(Serialize)]
        struct Recorded<'a> {
            label: &'a str,
            examples: usize,
            store_entries: usize,
        }
        return print_summary(
            &Recorded {
                label,
                examples: examples.len(),
                store_entries: store.len(),
            },
            args.run.json,
        );
    }
    let baseline = args.baseline.as_deref().unwrap_or_default();
    let row = preference_row(&args.label, &examples, &store, &args.benchmark, baseline)
        .map_err(|e| CliError::Config(e.to_string()))?;
    write_json(&args.out.join("preference_score.json"), &row)?;
    manifest.write(&args.out)?;
    print_summary(&row, args.run.json)
}
