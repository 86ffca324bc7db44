//! Structured model descriptions built from sampled task outcomes.
//!
//! Model endpoints are described to the policy by how they fared on a sample
//! of training tasks. [`build_model_description`] produces the structured
//! summary; a [`DescriptionWriter`] turns it into the text stored in the tool
//! object (the default writer is a fixed template, an external text generator
//! can be slotted in instead).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::env_sim::TaskSpec;
use crate::error::ToolError;
use crate::rollout::Trajectory;

/// First line of every protocol-conforming model description.
pub const DESCRIPTION_HEADER: &str = "Model profile:";

const WEAK_RATE: f64 = 0.5;
const STRONG_RATE: f64 = 0.8;
const MIN_ATTEMPTS: u32 = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainTally {
    pub attempted: u32,
    pub solved: u32,
}

impl DomainTally {
    pub fn rate(&self) -> f64 {
        if self.attempted == 0 {
            0.0
        } else {
            f64::from(self.solved) / f64::from(self.attempted)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDescription {
    pub model: String,
    pub overall: DomainTally,
    pub domains: BTreeMap<String, DomainTally>,
    pub mean_tool_calls: f64,
    pub tool_usage: BTreeMap<String, u64>,
    pub strengths: Vec<String>,
    pub weaknesses: Vec<String>,
}

pub trait DescriptionWriter {
    fn write(&self, description: &ModelDescription) -> String;
}

/// Renders a [`ModelDescription`] with a fixed template.
#[derive(Clone, Copy, Debug, Default)]
pub struct TemplateWriter;

impl DescriptionWriter for TemplateWriter {
    fn write(&self, d: &ModelDescription) -> String {
        let mut out = format!("{DESCRIPTION_HEADER} {}\n", d.model);
        out.push_str(&format!(
            "Overall solved/attempted = {}/{}\n",
            d.overall.solved, d.overall.attempted
        ));
        for (domain, t) in &d.domains {
            out.push_str(&format!(
                "Domain {domain}: solved/attempted = {}/{}\n",
                t.solved, t.attempted
            ));
        }
        if !d.strengths.is_empty() {
            out.push_str("Strengths:\n");
            for s in &d.strengths {
                let t = d.domains[s];
                out.push_str(&format!("- {s}: solved {} of {} attempts\n", t.solved, t.attempted));
            }
        }
        if !d.weaknesses.is_empty() {
            out.push_str("Weaknesses:\n");
            for w in &d.weaknesses {
                let t = d.domains[w];
                out.push_str(&format!(
                    "- {w}: failed {} of {} attempts\n",
                    t.attempted - t.solved,
                    t.attempted
                ));
            }
        }
        out.push_str(&format!("Behavior: {:.2} tool calls per task", d.mean_tool_calls));
        if !d.tool_usage.is_empty() {
            let mut usage: Vec<_> = d.tool_usage.iter().collect();
            usage.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
            let top: Vec<String> = usage.iter().take(3).map(|(n, c)| format!("{n} ({c})")).collect();
            out.push_str(&format!("; most used tools: {}", top.join(", ")));
        }
        out.push('\n');
        out
    }
}

impl ModelDescription {
    pub fn render(&self) -> String {
        TemplateWriter.write(self)
    }
}

/// Summarizes how `model` fared on the sampled tasks. The three lists are parallel.
pub fn build_model_description(
    model: &str,
    tasks: &[TaskSpec],
    trajectories: &[Trajectory],
    outcomes: &[bool],
) -> Result<ModelDescription, ToolError> {
    if tasks.len() != trajectories.len() || tasks.len() != outcomes.len() {
        return Err(ToolError::DescriptionLengthMismatch {
            tasks: tasks.len(),
            trajectories: trajectories.len(),
            outcomes: outcomes.len(),
        });
    }
    if tasks.is_empty() {
        return Err(ToolError::EmptyDescriptionSample);
    }
    let mut overall = DomainTally::default();
    let mut domains: BTreeMap<String, DomainTally> = BTreeMap::new();
    let mut tool_usage: BTreeMap<String, u64> = BTreeMap::new();
    let mut calls = 0usize;
    for ((task, traj), &solved) in tasks.iter().zip(trajectories).zip(outcomes) {
        let entry = domains.entry(task.domain.clone()).or_default();
        entry.attempted += 1;
        overall.attempted += 1;
        if solved {
            entry.solved += 1;
            overall.solved += 1;
        }
        for call in traj.turns.iter().filter_map(|t| t.action.as_ref()) {
            calls += 1;
            *tool_usage.entry(call.tool_name.clone()).or_default() += 1;
        }
    }
    let strengths = domains
        .iter()
        .filter(|(_, t)| t.attempted >= MIN_ATTEMPTS && t.rate() >= STRONG_RATE)
        .map(|(d, _)| d.clone())
        .collect();
    let weaknesses = domains
        .iter()
        .filter(|(_, t)| t.attempted >= MIN_ATTEMPTS && t.rate() < WEAK_RATE)
        .map(|(d, _)| d.clone())
        .collect();
    Ok(ModelDescription {
        model: model.to_string(),
        overall,
        domains,
        mean_tool_calls: calls as f64 / tasks.len() as f64,
        tool_usage,
        strengths,
        weaknesses,
    })
}
