use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::db::DomainDb;
use super::episode::EpisodeState;
use crate::error::EnvError;
use crate::rewards::PreferenceProfile;
use crate::tool_registry::{PricingEntry, ToolCall, ToolCatalog, ToolResult};

/// One verifiable task: instruction, golden calls, required information and the
/// initial database they operate on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub task_id: String,
    pub domain: String,
    pub instruction: String,
    pub golden_calls: Vec<ToolCall>,
    /// Text the agent must communicate for the task to count as solved.
    pub required_info: String,
    pub initial_db: Arc<DomainDb>,
    /// Names of the catalog tools this instance may use.
    pub available_tools: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preference: Option<PreferenceProfile>,
    /// Reference answer for answer-keyed tasks; judged instead of verified.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold_answer: Option<String>,
    /// Per-instance pricing overrides keyed by pricing reference.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pricing: Option<BTreeMap<String, PricingEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intent: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub complications: Vec<String>,
}

impl TaskSpec {
    /// Independent deep copy of the initial database, ready for one rollout.
    pub fn fork_initial_state(&self) -> EpisodeState {
        EpisodeState::new(self.task_id.clone(), (*self.initial_db).clone())
    }

    pub fn is_available(&self, tool: &str) -> bool {
        self.available_tools.iter().any(|t| t == tool)
    }

    /// The catalog as seen by this instance: its tool subset and pricing.
    pub fn instance_catalog(&self, catalog: &ToolCatalog) -> Result<ToolCatalog, EnvError> {
        let mut view = catalog.subset(&self.available_tools)?;
        if let Some(p) = &self.pricing {
            view = view.with_pricing(p)?;
        }
        Ok(view)
    }

    /// Structural checks: there is something to verify, golden calls use available
    /// tools, and every available tool exists in `catalog`.
    pub fn validate(&self, catalog: &ToolCatalog) -> Result<(), EnvError> {
        let invalid = |reason: String| EnvError::InvalidTask {
            task: self.task_id.clone(),
            reason,
        };
        if self.golden_calls.is_empty() && self.gold_answer.is_none() && self.required_info.trim().is_empty() {
            return Err(invalid("nothing to verify: no golden calls, answer or required information".into()));
        }
        if let Some(missing) = self.available_tools.iter().find(|t| catalog.get(t).is_none()) {
            return Err(invalid(format!("tool `{missing}` is not in the catalog")));
        }
        if let Some(call) = self.golden_calls.iter().find(|c| !self.is_available(&c.tool_name)) {
            return Err(invalid(format!("golden call uses unavailable tool `{}`", call.tool_name)));
        }
        Ok(())
    }

    /// Replays the golden calls on a fresh fork. Any error observation or
    /// rejected call fails the replay.
    pub fn replay_golden(&self, catalog: &ToolCatalog) -> Result<(EpisodeState, Vec<ToolResult>), EnvError> {
        let mut state = self.fork_initial_state();
        let mut results = Vec::with_capacity(self.golden_calls.len());
        for (i, call) in self.golden_calls.iter().enumerate() {
            let result = state.apply_call(catalog, call, 0)?;
            if result.is_error {
                return Err(EnvError::InvalidTask {
                    task: self.task_id.clone(),
                    reason: format!(
                        "golden call {i} ({}) failed: {}",
                        call.tool_name,
                        result.error_detail.unwrap_or_default()
                    ),
                });
            }
            results.push(result);
        }
        Ok((state, results))
    }

    /// Final message of the reference solution.
    pub fn golden_answer_text(&self) -> String {
        match &self.gold_answer {
            Some(a) => a.clone(),
            None => format!("Done. {}", self.required_info),
        }
    }
}
