use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::db::{normalize_text, DiffEntry};
use super::task::TaskSpec;
use crate::error::EnvError;
use crate::rollout::Trajectory;
use crate::tool_registry::ToolCatalog;

/// Decides whether required information was communicated in some text.
pub trait InfoMatcher: Sync {
    fn mentions(&self, text: &str, required: &str) -> bool;
}

/// Casefolded, whitespace-collapsed substring match.
#[derive(Clone, Copy, Debug, Default)]
pub struct NormalizedSubstring;

impl InfoMatcher for NormalizedSubstring {
    fn mentions(&self, text: &str, required: &str) -> bool {
        normalize_text(text).contains(&normalize_text(required))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub task_id: String,
    pub execution_correctness: bool,
    pub process_fidelity: bool,
    pub operation_completeness: bool,
    pub solved: bool,
    /// Golden-replay database (expected) versus trajectory database (actual).
    pub diff: Vec<DiffEntry>,
    /// Entries the golden replay touched that the trajectory never did.
    pub missing_entries: Vec<(String, String)>,
}

/// Checks `trajectory` against `task` with the default matcher.
pub fn verify(task: &TaskSpec, trajectory: &Trajectory, catalog: &ToolCatalog) -> Result<VerificationReport, EnvError> {
    verify_with(task, trajectory, catalog, &NormalizedSubstring)
}

/// Replays the trajectory's actions and the golden calls on fresh forks and
/// compares final databases, touched entries and communicated output.
pub fn verify_with(
    task: &TaskSpec,
    trajectory: &Trajectory,
    catalog: &ToolCatalog,
    matcher: &dyn InfoMatcher,
) -> Result<VerificationReport, EnvError> {
    if trajectory.task_id != task.task_id {
        return Err(EnvError::TaskMismatch {
            expected: task.task_id.clone(),
            found: trajectory.task_id.clone(),
        });
    }
    let view = task.instance_catalog(catalog)?;
    let (golden, _) = task.replay_golden(&view)?;

    let mut replay = task.fork_initial_state();
    for call in trajectory.turns.iter().filter_map(|t| t.action.as_ref()) {
        if replay.is_terminated() {
            break;
        }
        if !task.is_available(&call.tool_name) {
            continue;
        }
        // Calls rejected by schema validation never reached the environment.
        let _ = replay.apply_call(&view, call, 0);
    }

    let diff = golden.db.diff(&replay.db);
    let visible: Vec<&str> = trajectory
        .turns
        .iter()
        .filter_map(|t| t.final_answer.as_deref())
        .collect();
    let process_fidelity =
        task.required_info.trim().is_empty() || matcher.mentions(&visible.join("\n"), &task.required_info);
    let touched: &BTreeSet<(String, String)> = replay.touched();
    let missing_entries: Vec<(String, String)> = golden.touched().difference(touched).cloned().collect();

    let execution_correctness = diff.is_empty();
    let operation_completeness = missing_entries.is_empty();
    Ok(VerificationReport {
        task_id: task.task_id.clone(),
        execution_correctness,
        process_fidelity,
        operation_completeness,
        solved: execution_correctness && process_fidelity && operation_completeness,
        diff,
        missing_entries,
    })
}
