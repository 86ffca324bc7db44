use serde::{Deserialize, Serialize};

use super::metrics::RawMetricVector;
use super::preference::validate_vector;
use crate::error::RewardError;

/// Batch-normalized metric vectors plus the per-coordinate range used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedBatch {
    pub vectors: Vec<Vec<f64>>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

/// Min-max normalizes every coordinate over the batch. A coordinate that is
/// constant across the batch is set to 0 for every trajectory.
pub fn normalize_batch(batch: &[RawMetricVector]) -> Result<NormalizedBatch, RewardError> {
    if batch.len() < 2 {
        return Err(RewardError::BatchTooSmall(batch.len()));
    }
    let dim = batch[0].0.len();
    if let Some(bad) = batch.iter().find(|v| v.0.len() != dim) {
        return Err(RewardError::DimensionMismatch {
            expected: dim,
            found: bad.0.len(),
        });
    }
    let mut min = vec![f64::INFINITY; dim];
    let mut max = vec![f64::NEG_INFINITY; dim];
    for v in batch {
        for (k, &x) in v.0.iter().enumerate() {
            min[k] = min[k].min(x);
            max[k] = max[k].max(x);
        }
    }
    let vectors = batch
        .iter()
        .map(|v| {
            v.0.iter()
                .enumerate()
                .map(|(k, &x)| {
                    let range = max[k] - min[k];
                    if range > 0.0 {
                        ((x - min[k]) / range).clamp(0.0, 1.0)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    Ok(NormalizedBatch { vectors, min, max })
}

/// `normalized · preference` when the outcome is a success, otherwise 0.
pub fn final_reward(normalized: &[f64], preference: &[f64], outcome: bool) -> Result<f64, RewardError> {
    if normalized.len() != preference.len() {
        return Err(RewardError::DimensionMismatch {
            expected: preference.len(),
            found: normalized.len(),
        });
    }
    if !outcome {
        return Ok(0.0);
    }
    Ok(normalized.iter().zip(preference).map(|(a, b)| a * b).sum())
}

/// [`final_reward`] with the preference vector checked for range as well.
pub fn checked_final_reward(normalized: &[f64], preference: &[f64], outcome: bool) -> Result<f64, RewardError> {
    validate_vector(preference, preference.len().saturating_sub(3))?;
    final_reward(normalized, preference, outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(v: &[f64]) -> RawMetricVector {
        RawMetricVector(v.to_vec())
    }

    #[test]
    fn min_max_of_two_four_six() {
        let b = normalize_batch(&[raw(&[2.0, 1.0, -0.5, -1.0]), raw(&[4.0, 1.0, -0.5, -2.0]), raw(&[6.0, 0.0, -0.5, -3.0])])
            .unwrap();
        assert_eq!(b.vectors.iter().map(|v| v[0]).collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
        assert_eq!(b.vectors.iter().map(|v| v[2]).collect::<Vec<_>>(), vec![0.0, 0.0, 0.0]);
        assert_eq!(b.vectors[0][3], 1.0);
    }

    #[test]
    fn singleton_batch_rejected() {
        assert!(matches!(normalize_batch(&[raw(&[1.0, 1.0, 0.0, 0.0])]), Err(RewardError::BatchTooSmall(1))));
    }

    #[test]
    fn gate_and_projection() {
        let n = [0.2, 0.9, 1.0, 0.4, 0.0];
        assert_eq!(final_reward(&n, &[1.0; 5], false).unwrap(), 0.0);
        assert_eq!(final_reward(&n, &[0.0, 0.0, 1.0, 0.0, 0.0], true).unwrap(), 1.0);
        assert!(final_reward(&n, &[1.0; 4], true).is_err());
    }
}
