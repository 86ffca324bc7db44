use serde::{Deserialize, Serialize};

use crate::error::RewardError;

/// A preference instruction together with its vector over
/// `[tool_1..tool_n, outcome, compute, latency]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreferenceProfile {
    pub instruction: String,
    pub vector: Vec<f64>,
    /// Identifies the catalog ordering the tool coordinates refer to.
    pub catalog_ref: String,
    /// Preference pair this profile was drawn from, when known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_id: Option<String>,
}

impl PreferenceProfile {
    pub fn new(instruction: impl Into<String>, vector: Vec<f64>, catalog_ref: impl Into<String>) -> Self {
        Self {
            instruction: instruction.into(),
            vector,
            catalog_ref: catalog_ref.into(),
            pair_id: None,
        }
    }

    pub fn with_pair_id(mut self, pair_id: impl Into<String>) -> Self {
        self.pair_id = Some(pair_id.into());
        self
    }

    /// Checks length `n_tools + 3` and that every weight lies in `[0, 1]`.
    pub fn validate(&self, n_tools: usize) -> Result<(), RewardError> {
        validate_vector(&self.vector, n_tools)
    }

    pub fn outcome_weight(&self) -> f64 {
        self.vector[self.vector.len() - 3]
    }

    pub fn compute_weight(&self) -> f64 {
        self.vector[self.vector.len() - 2]
    }

    pub fn latency_weight(&self) -> f64 {
        self.vector[self.vector.len() - 1]
    }
}

pub fn validate_vector(vector: &[f64], n_tools: usize) -> Result<(), RewardError> {
    if vector.len() != n_tools + 3 {
        return Err(RewardError::DimensionMismatch {
            expected: n_tools + 3,
            found: vector.len(),
        });
    }
    if let Some((i, p)) = vector.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
        return Err(RewardError::InvalidPreference(format!("entry {i} = {p} is outside [0, 1]")));
    }
    Ok(())
}

/// Builds a vector from named weights. `tool_weights` pairs catalog positions
/// with weights; unnamed tools get 0.
pub fn preference_vector(
    n_tools: usize,
    tool_weights: &[(usize, f64)],
    outcome: f64,
    compute: f64,
    latency: f64,
) -> Vec<f64> {
    let mut v = vec![0.0; n_tools + 3];
    for &(i, w) in tool_weights {
        v[i] = w;
    }
    v[n_tools] = outcome;
    v[n_tools + 1] = compute;
    v[n_tools + 2] = latency;
    v
}
