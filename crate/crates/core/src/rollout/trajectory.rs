use serde::{Deserialize, Serialize};

use crate::env_sim::TerminationReason;
use crate::tool_registry::{ToolCall, ToolResult};

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

/// One reasoning/action/observation step.
///
/// A well-formed turn carries exactly one of `action` or `final_answer`, and
/// an observation iff it carries an action. A turn whose policy output could
/// not be parsed carries neither and sets `format_violation`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Turn {
    pub reasoning: String,
    pub action: Option<ToolCall>,
    pub observation: Option<ToolResult>,
    pub final_answer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_violation: Option<String>,
    /// Cost of producing this turn when the policy is itself a priced model.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub policy_cost: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub policy_latency: f64,
}

impl Turn {
    pub fn cost(&self) -> f64 {
        self.policy_cost + self.observation.as_ref().map_or(0.0, |o| o.cost)
    }

    pub fn latency(&self) -> f64 {
        self.policy_latency + self.observation.as_ref().map_or(0.0, |o| o.latency)
    }

    pub fn is_well_formed(&self) -> bool {
        match (&self.action, &self.final_answer) {
            (Some(_), None) => self.observation.is_some() && self.format_violation.is_none(),
            (None, Some(_)) => self.observation.is_none() && self.format_violation.is_none(),
            (None, None) => self.format_violation.is_some() && self.observation.is_none(),
            (Some(_), Some(_)) => false,
        }
    }
}

/// Episode totals: `cost` in dollars, `latency` in seconds, `tool_counts`
/// indexed by catalog position.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Totals {
    pub cost: f64,
    pub latency: f64,
    pub tool_counts: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub task_id: String,
    pub turns: Vec<Turn>,
    pub totals: Totals,
    pub termination_reason: TerminationReason,
    /// Sum of the preference weights of the tools called.
    #[serde(default)]
    pub preference_alignment: f64,
    /// Set by reward computation, never by the rollout loop.
    #[serde(default)]
    pub outcome: Option<bool>,
    pub max_turns: u32,
}

impl Trajectory {
    pub fn actions(&self) -> impl Iterator<Item = &ToolCall> {
        self.turns.iter().filter_map(|t| t.action.as_ref())
    }

    pub fn action_turns(&self) -> usize {
        self.actions().count()
    }

    /// The last final answer, if any turn emitted one.
    pub fn final_answer(&self) -> Option<&str> {
        self.turns.iter().rev().find_map(|t| t.final_answer.as_deref())
    }

    pub fn has_format_violation(&self) -> bool {
        self.turns.iter().any(|t| t.format_violation.is_some())
    }

    /// Cost in dollars after each turn.
    pub fn cost_prefix(&self) -> Vec<f64> {
        self.turns
            .iter()
            .scan(0.0, |acc, t| {
                *acc += t.cost();
                Some(*acc)
            })
            .collect()
    }
}
