//! Preference-aware evaluation against a baseline policy.
//!
//! Evaluation vectors store positive magnitudes: `[tool counts.., outcome,
//! cost in cents, latency in seconds]`. Count and outcome coordinates score
//! `current / max(1, baseline)`; cost and latency score
//! `baseline / max(1, current)`, so cheaper or faster than the baseline scores
//! higher.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env_sim::write_jsonl;
use crate::error::{EnvError, RewardError};
use crate::rollout::Trajectory;
use crate::tool_registry::ToolCatalog;

pub const CENTS_PER_DOLLAR: f64 = 100.0;

/// `[counts.., outcome, cost (cents), latency (s)]`, all non-negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EvalVector(pub Vec<f64>);

impl EvalVector {
    pub fn from_trajectory(trajectory: &Trajectory, catalog: &ToolCatalog, outcome: bool) -> Result<Self, RewardError> {
        let counts = &trajectory.totals.tool_counts;
        if counts.len() != catalog.len() {
            return Err(RewardError::CatalogMismatch {
                expected: catalog.len(),
                found: counts.len(),
            });
        }
        let mut v: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        v.push(if outcome { 1.0 } else { 0.0 });
        v.push(trajectory.totals.cost * CENTS_PER_DOLLAR);
        v.push(trajectory.totals.latency);
        Ok(Self(v))
    }
}

/// Normalizes `current` against `baseline` coordinate by coordinate.
pub fn eval_normalize(current: &[f64], baseline: &[f64]) -> Result<Vec<f64>, RewardError> {
    if current.len() != baseline.len() || current.len() < 3 {
        return Err(RewardError::Misaligned(format!(
            "current has {} coordinates, baseline {}",
            current.len(),
            baseline.len()
        )));
    }
    let split = current.len() - 2;
    Ok(current
        .iter()
        .zip(baseline)
        .enumerate()
        .map(|(k, (&c, &b))| if k < split { c / b.max(1.0) } else { b / c.max(1.0) })
        .collect())
}

/// Evaluation reward of one example; 0 when the example failed.
pub fn eval_reward(current: &[f64], baseline: &[f64], preference: &[f64], outcome: bool) -> Result<f64, RewardError> {
    let normalized = eval_normalize(current, baseline)?;
    if preference.len() != normalized.len() {
        return Err(RewardError::DimensionMismatch {
            expected: normalized.len(),
            found: preference.len(),
        });
    }
    if !outcome {
        return Ok(0.0);
    }
    Ok(normalized.iter().zip(preference).map(|(a, b)| a * b).sum())
}

/// Benchmark score: the sum over examples (canonical) and the per-example mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreferenceScore {
    pub sum: f64,
    pub mean: f64,
    pub examples: usize,
}

impl PreferenceScore {
    pub fn from_rewards(rewards: &[f64]) -> Self {
        let sum: f64 = rewards.iter().sum();
        Self {
            sum,
            mean: if rewards.is_empty() { 0.0 } else { sum / rewards.len() as f64 },
            examples: rewards.len(),
        }
    }
}

/// One evaluated example awaiting scoring.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalExample {
    pub example_id: String,
    pub vector: EvalVector,
    pub preference: Vec<f64>,
    pub outcome: bool,
}

/// Scores `examples` against the baseline recorded under `(benchmark, label)`.
pub fn preference_score(
    examples: &[EvalExample],
    store: &BaselineStore,
    benchmark: &str,
    baseline_label: &str,
) -> Result<PreferenceScore, RewardError> {
    let mut rewards = Vec::with_capacity(examples.len());
    for e in examples {
        let base = store
            .get(benchmark, &e.example_id, baseline_label)
            .ok_or_else(|| RewardError::Misaligned(format!("no baseline for example `{}`", e.example_id)))?;
        rewards.push(eval_reward(&e.vector.0, &base.0, &e.preference, e.outcome)?);
    }
    Ok(PreferenceScore::from_rewards(&rewards))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineEntry {
    pub benchmark: String,
    pub example_id: String,
    pub policy_label: String,
    pub vector: EvalVector,
}

/// Baseline vectors keyed by `(benchmark, example_id, policy_label)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BaselineStore {
    entries: BTreeMap<(String, String, String), EvalVector>,
}

impl BaselineStore {
    pub fn insert(&mut self, benchmark: &str, example_id: &str, policy_label: &str, vector: EvalVector) {
        self.entries.insert(
            (benchmark.to_string(), example_id.to_string(), policy_label.to_string()),
            vector,
        );
    }

    pub fn get(&self, benchmark: &str, example_id: &str, policy_label: &str) -> Option<&EvalVector> {
        self.entries
            .get(&(benchmark.to_string(), example_id.to_string(), policy_label.to_string()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> Vec<BaselineEntry> {
        self.entries
            .iter()
            .map(|((benchmark, example_id, policy_label), vector)| BaselineEntry {
                benchmark: benchmark.clone(),
                example_id: example_id.clone(),
                policy_label: policy_label.clone(),
                vector: vector.clone(),
            })
            .collect()
    }

    pub fn save(&self, path: &Path) -> Result<(), RewardError> {
        write_jsonl(path, &self.entries()).map_err(|e| match e {
            EnvError::Io(io) => RewardError::Io(io),
            EnvError::Json(j) => RewardError::Json(j),
            other => RewardError::Env(other),
        })
    }

    pub fn load(path: &Path) -> Result<Self, RewardError> {
        let mut store = Self::default();
        for line in BufReader::new(fs::File::open(path)?).lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let e: BaselineEntry = serde_json::from_str(&line)?;
            store.insert(&e.benchmark, &e.example_id, &e.policy_label, e.vector);
        }
        Ok(store)
    }
}
