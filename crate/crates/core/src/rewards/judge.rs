use serde::{Deserialize, Serialize};

use crate::env_sim::{verify, TaskSpec, VerificationReport};
use crate::error::RewardError;
use crate::rollout::Trajectory;
use crate::tool_registry::ToolCatalog;

/// Decides whether a predicted answer matches a reference answer.
pub trait Judge: Sync {
    fn judge(&self, predicted: &str, gold: &str) -> bool;
}

/// Exact match after casefolding, stripping punctuation and articles, and
/// collapsing whitespace.
#[derive(Clone, Copy, Debug, Default)]
pub struct NormalizedExactMatch;

pub fn normalize_answer(text: &str) -> String {
    let lowered: String = text
        .to_lowercase()
        .chars()
        .map(|c| if c.is_alphanumeric() || c.is_whitespace() { c } else { ' ' })
        .collect();
    lowered
        .split_whitespace()
        .filter(|w| !matches!(*w, "a" | "an" | "the"))
        .collect::<Vec<_>>()
        .join(" ")
}

impl Judge for NormalizedExactMatch {
    fn judge(&self, predicted: &str, gold: &str) -> bool {
        normalize_answer(predicted) == normalize_answer(gold)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeVerdict {
    pub outcome: bool,
    /// No final answer was produced.
    pub invalid_output: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<VerificationReport>,
}

/// Binary outcome: the judge's verdict for answer-keyed tasks, the verifier's
/// for environment tasks.
pub fn outcome_reward(
    task: &TaskSpec,
    trajectory: &Trajectory,
    catalog: &ToolCatalog,
    judge: &dyn Judge,
) -> Result<OutcomeVerdict, RewardError> {
    let answer = trajectory.final_answer();
    let invalid_output = answer.is_none();
    if let Some(gold) = &task.gold_answer {
        return Ok(OutcomeVerdict {
            outcome: answer.is_some_and(|a| judge.judge(a, gold)),
            invalid_output,
            report: None,
        });
    }
    let report = verify(task, trajectory, catalog)?;
    Ok(OutcomeVerdict {
        outcome: report.solved,
        invalid_output,
        report: Some(report),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn casefold_articles_punctuation() {
        let j = NormalizedExactMatch;
        assert!(j.judge("Paris", "paris"));
        assert!(j.judge("The Eiffel Tower!", "eiffel   tower"));
        assert!(!j.judge("Lyon", "Paris"));
    }
}
