use serde::{Deserialize, Serialize};

use super::metrics::RawMetricVector;
use super::normalize::{final_reward, normalize_batch};
use crate::error::RewardError;

/// Per-trajectory reward record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub task_id: String,
    pub raw: RawMetricVector,
    pub normalized: Vec<f64>,
    #[serde(rename = "final")]
    pub final_reward: f64,
    pub advantage: Option<f64>,
}

/// Rewards of one batch plus the per-coordinate range used to normalize it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub entries: Vec<RewardBreakdown>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

/// One scored trajectory's inputs.
#[derive(Clone, Debug)]
pub struct RewardInput<'a> {
    pub task_id: &'a str,
    pub raw: RawMetricVector,
    pub preference: &'a [f64],
    pub outcome: bool,
}

/// Normalizes the batch and applies each trajectory's own preference vector.
pub fn score_batch(inputs: &[RewardInput<'_>]) -> Result<BatchReport, RewardError> {
    let raws: Vec<RawMetricVector> = inputs.iter().map(|i| i.raw.clone()).collect();
    let batch = normalize_batch(&raws)?;
    let entries = inputs
        .iter()
        .zip(batch.vectors)
        .map(|(input, normalized)| {
            Ok(RewardBreakdown {
                task_id: input.task_id.to_string(),
                final_reward: final_reward(&normalized, input.preference, input.outcome)?,
                raw: input.raw.clone(),
                normalized,
                advantage: None,
            })
        })
        .collect::<Result<Vec<_>, RewardError>>()?;
    Ok(BatchReport {
        entries,
        min: batch.min,
        max: batch.max,
    })
}
