use std::fs::{self, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Args;
use conductor_core::grpo::{train_toy_policy, ToyPolicy, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::common::{load_bundle, print_summary, resolve_preference, select_split, Checkpoint, RunFlags, SplitArg};
use crate::error::CliError;
use crate::manifest::{file_hash, write_json, RunManifest};

#[derive(Args, Debug, Serialize)]
pub struct TrainArgs {
    /// Training config JSON.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides `env_bundle` from the config.
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Continue from this checkpoint.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub tasks_per_step: Option<usize>,
    /// Consecutive steps with every group filtered before giving up.
    #[arg(long, default_value_t = 20)]
    pub patience: usize,
    #[arg(long, value_enum, default_value = "train")]
    pub split: SplitArg,
    #[command(flatten)]
    pub run: RunFlags,
}

/// On-disk training config. Unset fields take the trainer defaults.
#[derive(Debug, Default, Deserialize)]
pub struct TrainFile {
    #[serde(flatten)]
    pub train: serde_json::Map<String, serde_json::Value>,
    #[serde(default)]
    pub preference_ref: Option<String>,
    #[serde(default)]
    pub env_bundle: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct TrainSummary {
    pub steps_run: usize,
    pub next_step: usize,
    pub final_mean_reward: Option<f64>,
    pub stalled_steps: usize,
    pub checkpoint_sha256: String,
}

fn config_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

fn resolve(args: &TrainArgs) -> Result<(TrainConfig, Option<String>, PathBuf), CliError> {
    let mut file = TrainFile::default();
    let mut base_dir = PathBuf::new();
    if let Some(path) = &args.config {
        let text = fs::read_to_string(path).map_err(|e| config_err(path, e))?;
        file = serde_json::from_str(&text).map_err(|e| config_err(path, e))?;
        base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    }
    let mut cfg: TrainConfig = serde_json::from_value(serde_json::Value::Object(file.train.clone()))
        .map_err(|e| CliError::Config(e.to_string()))?;
    // A flag left at its default does not override the file.
    let unset = |key: &str| !file.train.contains_key(key);
    if unset("seed") || args.run.seed != 0 {
        cfg.seed = args.run.seed;
    }
    if unset("group_size") || args.run.group_size != 8 {
        cfg.group_size = args.run.group_size;
    }
    if unset("max_turns") || args.run.max_turns != 50 {
        cfg.max_turns = args.run.max_turns;
    }
    if let Some(s) = args.steps {
        cfg.steps = s;
    }
    if let Some(lr) = args.lr {
        cfg.learning_rate = lr;
    }
    if let Some(n) = args.tasks_per_step {
        cfg.tasks_per_step = n;
    }
    let bundle = match (&args.bundle, &file.env_bundle) {
        (Some(b), _) => b.clone(),
        (None, Some(b)) => base_dir.join(b),
        (None, None) => return Err(CliError::Config("no bundle: pass --bundle or set env_bundle".into())),
    };
    let preference = args.run.preference.clone().or(file.preference_ref);
    Ok((cfg, preference, bundle))
}

pub fn run(args: &TrainArgs) -> Result<(), CliError> {
    let (mut cfg, preference, bundle_dir) = resolve(args)?;
    let flags = RunFlags {
        preference: None,
        ..args.run.clone()
    };
    let mut bundle = load_bundle(&bundle_dir, &flags)?;
    if let Some(pref) = &preference {
        let profile = resolve_preference(&bundle, pref)?;
        for t in &mut bundle.tasks {
            t.preference = Some(profile.clone());
        }
    }
    let tasks = select_split(&bundle, args.split);

    let (mut policy, mut next_step) = match &args.resume {
        Some(path) => {
            let ckpt = Checkpoint::load(path)?;
            if ckpt.policy.n_tools != bundle.catalog.len() {
                return Err(CliError::Config("checkpoint does not match the bundle's catalog".into()));
            }
            cfg.seed = ckpt.seed;
            (ckpt.policy, ckpt.next_step)
        }
        None => (ToyPolicy::zeros(bundle.catalog.len()), 0),
    };
    cfg.validate()?;
    if cfg.steps > 0 && tasks.is_empty() {
        return Err(CliError::Env("no tasks in the selected split".into()));
    }

    fs::create_dir_all(&args.out)?;
    let metrics_path = args.out.join("metrics.jsonl");
    let mut metrics = BufWriter::new(
        OpenOptions::new()
            .create(true)
            .write(true)
            .append(args.resume.is_some())
            .truncate(args.resume.is_none())
            .open(&metrics_path)?,
    );

    let start_step = next_step;
    let step_cfg = TrainConfig { steps: 1, ..cfg.clone() };
    let mut streak = 0;
    let mut last_reward = None;
    let mut stalled = false;
    for _ in 0..cfg.steps {
        let history = train_toy_policy(&mut policy, &tasks, &bundle.catalog, &step_cfg, next_step, |_, _| {})?;
        next_step += 1;
        for m in &history {
            serde_json::to_writer(&mut metrics, m)?;
            metrics.write_all(b"\n")?;
            last_reward = Some(m.mean_reward);
            streak = if m.update.step_accepted { 0 } else { streak + 1 };
        }
        if streak > args.patience {
            stalled = true;
            break;
        }
    }
    metrics.flush()?;

    let ckpt_path = args.out.join("checkpoint.json");
    write_json(
        &ckpt_path,
        &Checkpoint {
            next_step,
            seed: cfg.seed,
            policy,
        },
    )?;
    let mut inputs: Vec<PathBuf> = vec![bundle_dir.clone()];
    inputs.extend(args.config.clone());
    inputs.extend(args.resume.clone());
    inputs.extend(crate::common::flag_inputs(&args.run));
    let refs: Vec<&Path> = inputs.iter().map(|p| p.as_path()).collect();
    RunManifest::new("train", serde_json::to_value(args)?, &refs, cfg.seed, &args.out)?.write(&args.out)?;

    print_summary(
        &TrainSummary {
            steps_run: next_step - start_step,
            next_step,
            final_mean_reward: last_reward,
            stalled_steps: streak,
            checkpoint_sha256: file_hash(&ckpt_path)?,
        },
        args.run.json,
    )?;
    if stalled {
        return Err(CliError::Stall(format!(
            "every group was filtered for {streak} consecutive steps (patience {})",
            args.patience
        )));
    }
    Ok(())
}
