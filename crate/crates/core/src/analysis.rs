//! Aggregates over trajectory logs: tool-usage proportions, cost versus solve
//! rate, and preference scores. Everything is recomputed from the logs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::env_sim::TaskSpec;
use crate::error::RewardError;
use crate::rewards::{preference_score, BaselineStore, EvalExample, EvalVector, PreferenceScore, CENTS_PER_DOLLAR};
use crate::rollout::Trajectory;
use crate::tool_registry::ToolCatalog;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToolUsageRow {
    pub tool: String,
    /// Mean number of calls per trajectory.
    pub mean_calls: f64,
    /// Fraction of all tool calls in the log.
    pub share: f64,
}

/// Per-tool call statistics. `tools` names the positions of `tool_counts`.
pub fn tool_usage(trajectories: &[Trajectory], tools: &[String]) -> Result<Vec<ToolUsageRow>, RewardError> {
    let mut totals = vec![0u64; tools.len()];
    for t in trajectories {
        if t.totals.tool_counts.len() != tools.len() {
            return Err(RewardError::CatalogMismatch {
                expected: tools.len(),
                found: t.totals.tool_counts.len(),
            });
        }
        for (acc, c) in totals.iter_mut().zip(&t.totals.tool_counts) {
            *acc += c;
        }
    }
    let all: u64 = totals.iter().sum();
    let n = trajectories.len().max(1) as f64;
    Ok(tools
        .iter()
        .zip(totals)
        .map(|(tool, c)| ToolUsageRow {
            tool: tool.clone(),
            mean_calls: c as f64 / n,
            share: if all == 0 { 0.0 } else { c as f64 / all as f64 },
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostPoint {
    pub label: String,
    pub max_turns: u32,
    pub trajectories: usize,
    pub mean_cost_cents: f64,
    pub mean_latency_s: f64,
    /// Fraction of trajectories whose recorded outcome is a success.
    pub solve_rate: f64,
}

pub fn cost_point(label: &str, trajectories: &[Trajectory]) -> CostPoint {
    let n = trajectories.len().max(1) as f64;
    CostPoint {
        label: label.to_string(),
        max_turns: trajectories.iter().map(|t| t.max_turns).max().unwrap_or(0),
        trajectories: trajectories.len(),
        mean_cost_cents: trajectories.iter().map(|t| t.totals.cost).sum::<f64>() * CENTS_PER_DOLLAR / n,
        mean_latency_s: trajectories.iter().map(|t| t.totals.latency).sum::<f64>() / n,
        solve_rate: trajectories.iter().filter(|t| t.outcome == Some(true)).count() as f64 / n,
    }
}

/// One point per log, ordered by turn cap and then label.
pub fn cost_curve(logs: &[(String, Vec<Trajectory>)]) -> Vec<CostPoint> {
    let mut points: Vec<CostPoint> = logs.iter().map(|(label, t)| cost_point(label, t)).collect();
    points.sort_by(|a, b| a.max_turns.cmp(&b.max_turns).then_with(|| a.label.cmp(&b.label)));
    points
}

/// Evaluation examples for trajectories of tasks that carry a preference.
/// Repeated rollouts of one task are numbered `task_id#k`.
pub fn eval_examples(
    trajectories: &[Trajectory],
    tasks: &[TaskSpec],
    catalog: &ToolCatalog,
) -> Result<Vec<EvalExample>, RewardError> {
    let by_id: BTreeMap<&str, &TaskSpec> = tasks.iter().map(|t| (t.task_id.as_str(), t)).collect();
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let mut out = Vec::new();
    for traj in trajectories {
        let Some(preference) = by_id.get(traj.task_id.as_str()).and_then(|t| t.preference.as_ref()) else {
            continue;
        };
        let k = seen.entry(traj.task_id.as_str()).or_default();
        let outcome = traj.outcome.unwrap_or(false);
        out.push(EvalExample {
            example_id: format!("{}#{k}", traj.task_id),
            vector: EvalVector::from_trajectory(traj, catalog, outcome)?,
            preference: preference.vector.clone(),
            outcome,
        });
        *k += 1;
    }
    Ok(out)
}

/// Stores each example's vector as the baseline under `label`.
pub fn record_baseline(store: &mut BaselineStore, benchmark: &str, label: &str, examples: &[EvalExample]) {
    for e in examples {
        store.insert(benchmark, &e.example_id, label, e.vector.clone());
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreferenceRow {
    pub label: String,
    pub benchmark: String,
    pub baseline: String,
    pub sum: f64,
    pub mean: f64,
    pub examples: usize,
}

pub fn preference_row(
    label: &str,
    examples: &[EvalExample],
    store: &BaselineStore,
    benchmark: &str,
    baseline: &str,
) -> Result<PreferenceRow, RewardError> {
    let PreferenceScore { sum, mean, examples } = preference_score(examples, store, benchmark, baseline)?;
    Ok(PreferenceRow {
        label: label.to_string(),
        benchmark: benchmark.to_string(),
        baseline: baseline.to_string(),
        sum,
        mean,
        examples,
    })
}
