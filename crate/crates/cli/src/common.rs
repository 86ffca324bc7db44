use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use conductor_core::env_sim::{EnvBundle, Split};
use conductor_core::grpo::{fill_arguments, ToyPolicy};
use conductor_core::rewards::{validate_vector, PreferenceProfile};
use conductor_core::rollout::{AnswerImmediately, GoldenReplay, NeverAnswer, Policy};
use conductor_core::{PricingEntry, TaskSpec, ToolCall, ToolCatalog};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Flags shared by every command that runs episodes.
#[derive(Args, Clone, Debug, Serialize)]
pub struct RunFlags {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub max_turns: u32,
    #[arg(long, default_value_t = 8)]
    pub group_size: usize,
    /// JSON map from pricing reference to pricing entry. Overrides both bundle and per-task prices.
    #[arg(long)]
    pub pricing: Option<PathBuf>,
    /// A preference pair id from the bundle, or a JSON file `{instruction, vector}`.
    #[arg(long)]
    pub preference: Option<String>,
    /// Print the summary as JSON.
    #[arg(long)]
    #[serde(skip)]
    pub json: bool,
}

#[derive(Deserialize)]
struct PreferenceFile {
    #[serde(default)]
    instruction: String,
    vector: Vec<f64>,
}

/// Loads a bundle and applies the pricing and preference overrides.
pub fn load_bundle(dir: &Path, flags: &RunFlags) -> Result<EnvBundle, CliError> {
    let mut bundle = EnvBundle::load(dir).map_err(|e| CliError::Env(e.to_string()))?;
    if let Some(path) = &flags.pricing {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let overrides: BTreeMap<String, PricingEntry> =
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        bundle.catalog = bundle
            .catalog
            .with_pricing(&overrides)
            .map_err(|e| CliError::Config(e.to_string()))?;
        for task in &mut bundle.tasks {
            if let Some(own) = &mut task.pricing {
                own.extend(overrides.iter().map(|(k, v)| (k.clone(), *v)));
            }
        }
    }
    if let Some(pref) = &flags.preference {
        let profile = resolve_preference(&bundle, pref)?;
        for task in &mut bundle.tasks {
            task.preference = Some(profile.clone());
        }
    }
    Ok(bundle)
}

pub fn resolve_preference(bundle: &EnvBundle, spec: &str) -> Result<PreferenceProfile, CliError> {
    let catalog_ref = bundle.catalog_ref();
    if let Some(line) = bundle.preferences.iter().find(|p| p.pair_id == spec) {
        return Ok(line.profile(&catalog_ref));
    }
    let path = Path::new(spec);
    if !path.is_file() {
        return Err(CliError::Config(format!("`{spec}` is neither a preference pair id nor a file")));
    }
    let text = fs::read_to_string(path)?;
    let file: PreferenceFile =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    validate_vector(&file.vector, bundle.catalog.len()).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(PreferenceProfile::new(file.instruction, file.vector, catalog_ref))
}

/// Input files a run depends on, for the manifest hash.
pub fn flag_inputs(flags: &RunFlags) -> Vec<PathBuf> {
    let mut out = Vec::new();
    if let Some(p) = &flags.pricing {
        out.push(p.clone());
    }
    if let Some(p) = flags.preference.as_deref().map(Path::new).filter(|p| p.is_file()) {
        out.push(p.to_path_buf());
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitArg {
    Train,
    Eval,
    All,
}

/// Tasks of the chosen split. Tasks without a preference pair belong to the
/// train split.
pub fn select_split(bundle: &EnvBundle, split: SplitArg) -> Vec<TaskSpec> {
    bundle
        .tasks
        .iter()
        .filter(|t| match (split, bundle.split_of(t)) {
            (SplitArg::All, _) => true,
            (SplitArg::Eval, s) => s == Some(Split::Eval),
            (SplitArg::Train, s) => s != Some(Split::Eval),
        })
        .cloned()
        .collect()
}

/// Serialized training state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub next_step: usize,
    pub seed: u64,
    pub policy: ToyPolicy,
}

impl Checkpoint {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Policies selectable on the command line:
/// `golden`, `never`, `idle`, `toy` and `toy:CHECKPOINT`.
pub fn parse_policy(spec: &str, catalog: &ToolCatalog) -> Result<Box<dyn Policy>, CliError> {
    match spec {
        "golden" => Ok(Box::new(GoldenReplay)),
        "idle" => Ok(Box::new(AnswerImmediately(String::new()))),
        "never" => {
            let tool = catalog
                .tools()
                .first()
                .ok_or_else(|| CliError::Env("catalog has no tools".into()))?;
            Ok(Box::new(NeverAnswer {
                call: ToolCall::new(tool.name.clone(), fill_arguments(tool, "")),
            }))
        }
        "toy" => Ok(Box::new(ToyPolicy::zeros(catalog.len()))),
        other => match other.strip_prefix("toy:") {
            Some(path) => {
                let ckpt = Checkpoint::load(Path::new(path))?;
                if ckpt.policy.n_tools != catalog.len() {
                    return Err(CliError::Config(format!(
                        "checkpoint covers {} tools, catalog has {}",
                        ckpt.policy.n_tools,
                        catalog.len()
                    )));
                }
                Ok(Box::new(ckpt.policy))
            }
            None => Err(CliError::Config(format!("unknown policy `{other}`"))),
        },
    }
}

/// Checkpoint file named by a `toy:PATH` policy spec.
pub fn policy_input(spec: &str) -> Option<PathBuf> {
    spec.strip_prefix("toy:").map(PathBuf::from)
}

/// Prints `value` as one JSON line, or as `key=value` pairs.
pub fn print_summary<T: Serialize>(value: &T, json: bool) -> Result<(), CliError> {
    let v = serde_json::to_value(value)?;
    if json {
        println!("{}", serde_json::to_string(&v)?);
    } else if let serde_json::Value::Object(map) = v {
        let parts: Vec<String> = map.iter().map(|(k, v)| format!("{k}={v}")).collect();
        println!("{}", parts.join(" "));
    }
    Ok(())
}
