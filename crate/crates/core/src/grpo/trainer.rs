use std::collections::BTreeMap;

use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::advantages::group_advantages;
use super::filters::{apply_filters_to, trajectory_filters, STD_THRESHOLD};
use super::objective::{clipped_objective, term_gradients, RatioStats, EPSILON};
use super::toy_policy::{DecisionPoint, ToyPolicy};
use crate::env_sim::TaskSpec;
use crate::error::GrpoError;
use crate::rewards::{metric_vector, normalize_batch, outcome_reward, final_reward, NormalizedExactMatch};
use crate::rollout::{run_group, RolloutConfig, Trajectory};
use crate::seed::mix;
use crate::tool_registry::ToolCatalog;

fn default_group_size() -> usize {
    8
}
fn default_lr() -> f64 {
    1e-2
}
fn default_epsilon() -> f64 {
    EPSILON
}
fn default_threshold() -> f64 {
    STD_THRESHOLD
}
fn default_epochs() -> usize {
    1
}
fn default_tasks_per_step() -> usize {
    4
}
fn default_max_turns() -> u32 {
    crate::rollout::DEFAULT_MAX_TURNS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    #[serde(default = "default_group_size")]
    pub group_size: usize,
    #[serde(default)]
    pub steps: usize,
    #[serde(default = "default_lr", alias = "lr")]
    pub learning_rate: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_threshold")]
    pub std_threshold: f64,
    #[serde(default)]
    pub seed: u64,
    /// Gradient steps taken on each collected batch.
    #[serde(default = "default_epochs")]
    pub update_epochs: usize,
    /// Tasks sampled (without replacement) per step.
    #[serde(default = "default_tasks_per_step")]
    pub tasks_per_step: usize,
    #[serde(default = "default_max_turns")]
    pub max_turns: u32,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            group_size: default_group_size(),
            steps: 0,
            learning_rate: default_lr(),
            epsilon: default_epsilon(),
            std_threshold: default_threshold(),
            seed: 0,
            update_epochs: default_epochs(),
            tasks_per_step: default_tasks_per_step(),
            max_turns: default_max_turns(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), GrpoError> {
        let bad = |m: &str| Err(GrpoError::InvalidConfig(m.into()));
        if self.group_size < 2 {
            return Err(GrpoError::GroupTooSmall(self.group_size));
        }
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be finite and non-negative");
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if !(self.std_threshold >= 0.0) {
            return bad("std threshold must be non-negative");
        }
        if self.update_epochs == 0 || self.tasks_per_step == 0 || self.max_turns == 0 {
            return bad("update_epochs, tasks_per_step and max_turns must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpdateReport {
    pub objective_value: f64,
    pub clip_fraction: f64,
    pub ratio_stats: RatioStats,
    pub grad_norm: f64,
    /// False when every group was filtered and no update was made.
    pub step_accepted: bool,
}

/// One line of the metrics stream.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepMetrics {
    pub step: usize,
    pub mean_reward: f64,
    pub filtered_groups: usize,
    pub clip_fraction: f64,
    /// Share of tool calls per tool name across the step's rollouts.
    pub action_distribution: BTreeMap<String, f64>,
    pub update: UpdateReport,
}

/// A surviving trajectory ready for the policy update.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub points: Vec<DecisionPoint>,
    pub advantage: f64,
    pub old_log_prob: f64,
}

/// Rewards of one group, computed over the trajectories that survive the
/// per-trajectory filters.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoredGroup {
    pub rewards: Vec<f64>,
    pub kept: Vec<usize>,
    pub advantages: Vec<f64>,
    pub filtered: bool,
}

/// Scores a group: trajectory filters, outcomes, batch normalization over the
/// survivors, preference reward, homogeneity filter, advantages.
pub fn score_group(
    task: &TaskSpec,
    group: &[Trajectory],
    catalog: &ToolCatalog,
    std_threshold: f64,
) -> Result<ScoredGroup, GrpoError> {
    let verdicts = trajectory_filters(group);
    let survivors: Vec<usize> = (0..group.len()).filter(|i| verdicts[*i].is_none()).collect();
    let mut rewards = vec![0.0; group.len()];
    if survivors.len() >= 2 {
        let preference = default_preference(task, catalog.len());
        let mut outcomes = Vec::with_capacity(survivors.len());
        let mut raws = Vec::with_capacity(survivors.len());
        for &i in &survivors {
            let outcome = outcome_reward(task, &group[i], catalog, &NormalizedExactMatch)?.outcome;
            raws.push(metric_vector(&group[i], catalog, outcome)?);
            outcomes.push(outcome);
        }
        let batch = normalize_batch(&raws)?;
        for ((&i, normalized), outcome) in survivors.iter().zip(&batch.vectors).zip(&outcomes) {
            rewards[i] = final_reward(normalized, &preference, *outcome)?;
        }
    }
    let decision = apply_filters_to(&verdicts, &rewards, std_threshold);
    let mut advantages = vec![0.0; group.len()];
    if decision.group_dropped.is_none() {
        let kept_rewards: Vec<f64> = decision.kept.iter().map(|&i| rewards[i]).collect();
        let adv = group_advantages(&kept_rewards)?;
        for (&i, a) in decision.kept.iter().zip(adv.advantages) {
            advantages[i] = a;
        }
    }
    Ok(ScoredGroup {
        rewards,
        filtered: decision.group_dropped.is_some(),
        kept: decision.kept,
        advantages,
    })
}

/// The task's preference vector, or one-hot on the outcome coordinate.
pub fn default_preference(task: &TaskSpec, n_tools: usize) -> Vec<f64> {
    match &task.preference {
        Some(p) => p.vector.clone(),
        None => {
            let mut v = vec![0.0; n_tools + 3];
            v[n_tools] = 1.0;
            v
        }
    }
}

/// Objective value and gradient with respect to the policy weights.
pub fn objective_and_grad(
    policy: &ToyPolicy,
    samples: &[Sample],
    epsilon: f64,
) -> Result<(super::objective::ObjectiveValue, Vec<f64>), GrpoError> {
    let old: Vec<f64> = samples.iter().map(|s| s.old_log_prob).collect();
    let new: Vec<f64> = samples.iter().map(|s| policy.trajectory_log_prob(&s.points)).collect();
    let adv: Vec<f64> = samples.iter().map(|s| s.advantage).collect();
    let objective = clipped_objective(&old, &new, &adv, epsilon)?;
    let scales = term_gradients(&objective, &adv);
    let mut grad = vec![0.0; policy.weights.len()];
    for (s, scale) in samples.iter().zip(scales) {
        if scale != 0.0 {
            for p in &s.points {
                policy.accumulate_grad(p, scale, &mut grad);
            }
        }
    }
    Ok((objective, grad))
}

/// Trains `policy` in place. Step `k` draws its tasks and rollout seeds from
/// `mix(cfg.seed, start_step + k)`, so a run resumed at `start_step` continues
/// exactly as the uninterrupted run would.
pub fn train_toy_policy(
    policy: &mut ToyPolicy,
    tasks: &[TaskSpec],
    catalog: &ToolCatalog,
    cfg: &TrainConfig,
    start_step: usize,
    mut on_step: impl FnMut(&StepMetrics, &ToyPolicy),
) -> Result<Vec<StepMetrics>, GrpoError> {
    cfg.validate()?;
    if tasks.is_empty() {
        return Err(GrpoError::NoTasks);
    }
    let mut history = Vec::with_capacity(cfg.steps);
    for step in start_step..start_step + cfg.steps {
        let step_seed = mix(cfg.seed, step as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(step_seed);
        let count = cfg.tasks_per_step.min(tasks.len());
        let mut chosen: Vec<usize> = sample_indices(&mut rng, tasks.len(), count).into_vec();
        chosen.sort_unstable();

        let snapshot = policy.clone();
        let groups: Vec<Result<(usize, Vec<Trajectory>, ScoredGroup), GrpoError>> = chosen
            .par_iter()
            .enumerate()
            .map(|(slot, &t)| {
                let rcfg = RolloutConfig::default()
                    .with_seed(mix(step_seed, slot as u64 + 1))
                    .with_max_turns(cfg.max_turns);
                let group = run_group(&snapshot, &tasks[t], catalog, &rcfg, cfg.group_size)?;
                let scored = score_group(&tasks[t], &group, catalog, cfg.std_threshold)?;
                Ok((t, group, scored))
            })
            .collect();

        let mut samples = Vec::new();
        let mut filtered_groups = 0;
        let mut reward_sum = 0.0;
        let mut reward_count = 0usize;
        let mut calls: BTreeMap<String, u64> = BTreeMap::new();
        for g in groups {
            let (t, group, scored) = g?;
            reward_sum += scored.rewards.iter().sum::<f64>();
            reward_count += group.len();
            for call in group.iter().flat_map(|tr| tr.actions()) {
                *calls.entry(call.tool_name.clone()).or_default() += 1;
            }
            if scored.filtered {
                filtered_groups += 1;
                continue;
            }
            for &i in &scored.kept {
                let points = snapshot.decision_points(&tasks[t], &group[i], catalog);
                samples.push(Sample {
                    old_log_prob: snapshot.trajectory_log_prob(&points),
                    points,
                    advantage: scored.advantages[i],
                });
            }
        }

        let update = if samples.is_empty() {
            UpdateReport {
                objective_value: 0.0,
                clip_fraction: 0.0,
                ratio_stats: RatioStats {
                    min: 1.0,
                    mean: 1.0,
                    max: 1.0,
                },
                grad_norm: 0.0,
                step_accepted: false,
            }
        } else {
            let mut last = None;
            for _ in 0..cfg.update_epochs {
                let (objective, grad) = objective_and_grad(policy, &samples, cfg.epsilon)?;
                let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
                for (w, g) in policy.weights.iter_mut().zip(&grad) {
                    *w += cfg.learning_rate * g;
                }
                last = Some(UpdateReport {
                    objective_value: objective.value,
                    clip_fraction: objective.clip_fraction,
                    ratio_stats: objective.ratio_stats,
                    grad_norm,
                    step_accepted: true,
                });
            }
            last.expect("at least one epoch")
        };

        let total_calls: u64 = calls.values().sum();
        let metrics = StepMetrics {
            step,
            mean_reward: if reward_count == 0 { 0.0 } else { reward_sum / reward_count as f64 },
            filtered_groups,
            clip_fraction: update.clip_fraction,
            action_distribution: calls
                .into_iter()
                .map(|(k, v)| (k, v as f64 / total_calls.max(1) as f64))
                .collect(),
            update,
        };
        on_step(&metrics, policy);
        history.push(metrics);
    }
    Ok(history)
}
