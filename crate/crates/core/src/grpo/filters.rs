use serde::{Deserialize, Serialize};

use super::advantages::population_std;
use crate::rollout::Trajectory;

/// Default homogeneity threshold on a group's reward standard deviation.
pub const STD_THRESHOLD: f64 = 0.1;

/// Relative slack when comparing a computed standard deviation with the
/// threshold, so a group whose exact deviation equals the threshold is not
/// dropped because of rounding in the last bits.
pub const THRESHOLD_REL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterReason {
    /// Reward spread within the group is too small to carry signal.
    Homogeneity,
    /// The policy output violated the call format.
    Format,
    /// No valid final answer was produced.
    Invalid,
    /// Fewer than two trajectories survived the per-trajectory filters.
    TooFewSurvivors,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterDecision {
    /// Indices of surviving trajectories; empty when the group is dropped.
    pub kept: Vec<usize>,
    pub dropped: Vec<(usize, FilterReason)>,
    pub group_dropped: Option<FilterReason>,
    /// Population std of the rewards of trajectories that passed the
    /// per-trajectory filters.
    pub std: f64,
}

/// Per-trajectory verdicts: format violations first, then missing answers.
pub fn trajectory_filters(group: &[Trajectory]) -> Vec<Option<FilterReason>> {
    group
        .iter()
        .map(|t| {
            if t.has_format_violation() {
                Some(FilterReason::Format)
            } else if t.final_answer().is_none() {
                Some(FilterReason::Invalid)
            } else {
                None
            }
        })
        .collect()
}

/// True when a group with this reward std is dropped by the homogeneity filter.
pub fn is_homogeneous(std: f64, threshold: f64) -> bool {
    std < threshold * (1.0 - THRESHOLD_REL_TOLERANCE)
}

/// Applies the per-trajectory filters, then the homogeneity filter over the
/// rewards of the survivors. `rewards` is parallel to `verdicts`; entries of
/// dropped trajectories are ignored.
pub fn apply_filters_to(verdicts: &[Option<FilterReason>], rewards: &[f64], std_threshold: f64) -> FilterDecision {
    let mut dropped: Vec<(usize, FilterReason)> = verdicts
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.map(|r| (i, r)))
        .collect();
    let survivors: Vec<usize> = (0..verdicts.len()).filter(|i| verdicts[*i].is_none()).collect();
    let survivor_rewards: Vec<f64> = survivors.iter().map(|&i| rewards[i]).collect();
    let std = if survivor_rewards.is_empty() {
        0.0
    } else {
        population_std(&survivor_rewards)
    };
    let group_reason = if survivors.len() < 2 {
        Some(FilterReason::TooFewSurvivors)
    } else if is_homogeneous(std, std_threshold) {
        Some(FilterReason::Homogeneity)
    } else {
        None
    };
    match group_reason {
        Some(reason) => {
            dropped.extend(survivors.iter().map(|&i| (i, reason)));
            dropped.sort_by_key(|(i, _)| *i);
            FilterDecision {
                kept: Vec::new(),
                dropped,
                group_dropped: Some(reason),
                std,
            }
        }
        None => FilterDecision {
            kept: survivors,
            dropped,
            group_dropped: None,
            std,
        },
    }
}

/// [`apply_filters_to`] with verdicts taken from the trajectories themselves.
pub fn apply_filters(group: &[Trajectory], rewards: &[f64], std_threshold: f64) -> FilterDecision {
    apply_filters_to(&trajectory_filters(group), rewards, std_threshold)
}
