use serde::{Deserialize, Serialize};

use crate::error::RewardError;
use crate::rollout::Trajectory;
use crate::tool_registry::ToolCatalog;

/// `[tool counts.., outcome, -cost, -latency]` for one trajectory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RawMetricVector(pub Vec<f64>);

impl RawMetricVector {
    pub fn n_tools(&self) -> usize {
        self.0.len() - 3
    }

    pub fn tool_counts(&self) -> &[f64] {
        &self.0[..self.n_tools()]
    }

    pub fn outcome(&self) -> f64 {
        self.0[self.n_tools()]
    }

    /// Negated cost in dollars.
    pub fn compute(&self) -> f64 {
        self.0[self.n_tools() + 1]
    }

    /// Negated latency in seconds.
    pub fn latency(&self) -> f64 {
        self.0[self.n_tools() + 2]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Assembles the metric vector of `trajectory` against `catalog`.
pub fn metric_vector(
    trajectory: &Trajectory,
    catalog: &ToolCatalog,
    outcome: bool,
) -> Result<RawMetricVector, RewardError> {
    let counts = &trajectory.totals.tool_counts;
    if counts.len() != catalog.len() {
        return Err(RewardError::CatalogMismatch {
            expected: catalog.len(),
            found: counts.len(),
        });
    }
    let mut v: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    v.push(if outcome { 1.0 } else { 0.0 });
    v.push(-trajectory.totals.cost);
    v.push(-trajectory.totals.latency);
    Ok(RawMetricVector(v))
}
