use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::env_sim::TaskSpec;
use crate::rollout::{Policy, PolicyDecision, PolicyInput, Trajectory};
use crate::seed::hash_seed;
use crate::tool_registry::{ParamType, ToolCall, ToolCatalog, ToolSpec};

/// Number of hashed domain buckets in the feature vector.
pub const DOMAIN_BUCKETS: usize = 4;
/// Bias, turn position, and "last call failed" flag.
const BASE_FEATURES: usize = 3;

/// A linear softmax tool chooser.
///
/// Features are `[1, turn/10 (capped at 1), last call failed, domain one-hot
/// (hashed), preference vector]`; logits are `features · W / temperature` over
/// the tools of the full catalog, masked to the tools available in the task.
/// The policy answers, with the payload of its last successful observation, as
/// soon as it holds one; tool choices are its only stochastic decisions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToyPolicy {
    pub n_tools: usize,
    pub feature_dim: usize,
    /// Row-major `feature_dim × n_tools`.
    pub weights: Vec<f64>,
    pub temperature: f64,
}

/// One stochastic choice made by the policy, enough to recompute its
/// probability under different weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionPoint {
    pub features: Vec<f64>,
    pub mask: Vec<bool>,
    pub action: usize,
}

impl ToyPolicy {
    /// The untrained policy: all weights zero, uniform over available tools.
    pub fn zeros(n_tools: usize) -> Self {
        let feature_dim = BASE_FEATURES + DOMAIN_BUCKETS + n_tools + 3;
        Self {
            n_tools,
            feature_dim,
            weights: vec![0.0; feature_dim * n_tools],
            temperature: 1.0,
        }
    }

    pub fn features(&self, task: &TaskSpec, turn_index: u32, last_failed: bool) -> Vec<f64> {
        let mut f = vec![0.0; self.feature_dim];
        f[0] = 1.0;
        f[1] = (f64::from(turn_index) / 10.0).min(1.0);
        f[2] = if last_failed { 1.0 } else { 0.0 };
        let bucket = (hash_seed(0, task.domain.as_bytes()) % DOMAIN_BUCKETS as u64) as usize;
        f[BASE_FEATURES + bucket] = 1.0;
        if let Some(p) = &task.preference {
            let start = BASE_FEATURES + DOMAIN_BUCKETS;
            for (slot, w) in f[start..].iter_mut().zip(&p.vector) {
                *slot = *w;
            }
        }
        f
    }

    pub fn mask(&self, task: &TaskSpec, catalog: &ToolCatalog) -> Vec<bool> {
        let mut m = vec![false; self.n_tools];
        for t in &task.available_tools {
            if let Some(i) = catalog.index_of(t).filter(|&i| i < self.n_tools) {
                m[i] = true;
            }
        }
        m
    }

    pub fn logits(&self, features: &[f64]) -> Vec<f64> {
        (0..self.n_tools)
            .map(|a| {
                features
                    .iter()
                    .enumerate()
                    .map(|(f, x)| x * self.weights[f * self.n_tools + a])
                    .sum::<f64>()
                    / self.temperature
            })
            .collect()
    }

    /// Masked softmax; masked-out tools get probability 0.
    pub fn distribution(&self, features: &[f64], mask: &[bool]) -> Vec<f64> {
        let logits = self.logits(features);
        let max = logits
            .iter()
            .zip(mask)
            .filter(|(_, m)| **m)
            .map(|(l, _)| *l)
            .fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = logits
            .iter()
            .zip(mask)
            .map(|(l, m)| if *m { (l - max).exp() } else { 0.0 })
            .collect();
        let z: f64 = exps.iter().sum();
        exps.iter().map(|e| e / z).collect()
    }

    pub fn log_prob(&self, point: &DecisionPoint) -> f64 {
        let logits = self.logits(&point.features);
        let max = logits
            .iter()
            .zip(&point.mask)
            .filter(|(_, m)| **m)
            .map(|(l, _)| *l)
            .fold(f64::NEG_INFINITY, f64::max);
        let lse = max
            + logits
                .iter()
                .zip(&point.mask)
                .filter(|(_, m)| **m)
                .map(|(l, _)| (l - max).exp())
                .sum::<f64>()
                .ln();
        logits[point.action] - lse
    }

    /// Adds `scale · ∇_W log π(action)` into `grad`.
    pub fn accumulate_grad(&self, point: &DecisionPoint, scale: f64, grad: &mut [f64]) {
        let probs = self.distribution(&point.features, &point.mask);
        for (f, x) in point.features.iter().enumerate() {
            if *x == 0.0 {
                continue;
            }
            for a in 0..self.n_tools {
                if !point.mask[a] {
                    continue;
                }
                let indicator = if a == point.action { 1.0 } else { 0.0 };
                grad[f * self.n_tools + a] += scale * x * (indicator - probs[a]) / self.temperature;
            }
        }
    }

    /// Sum of the log-probabilities of the policy's choices.
    pub fn trajectory_log_prob(&self, points: &[DecisionPoint]) -> f64 {
        points.iter().map(|p| self.log_prob(p)).sum()
    }

    /// Reconstructs the choices this policy made in `trajectory`.
    pub fn decision_points(&self, task: &TaskSpec, trajectory: &Trajectory, catalog: &ToolCatalog) -> Vec<DecisionPoint> {
        let mask = self.mask(task, catalog);
        let mut last_failed = false;
        let mut out = Vec::new();
        for (i, turn) in trajectory.turns.iter().enumerate() {
            if let Some(call) = &turn.action {
                if let Some(action) = catalog.index_of(&call.tool_name).filter(|&a| a < self.n_tools && mask[a]) {
                    out.push(DecisionPoint {
                        features: self.features(task, i as u32, last_failed),
                        mask: mask.clone(),
                        action,
                    });
                }
                last_failed = turn.observation.as_ref().is_none_or(|o| o.is_error);
            }
        }
        out
    }

    /// Probability of each tool at the first turn of `task`.
    pub fn first_turn_distribution(&self, task: &TaskSpec, catalog: &ToolCatalog) -> Vec<f64> {
        self.distribution(&self.features(task, 0, false), &self.mask(task, catalog))
    }
}

/// Arguments for `tool`: string parameters receive the instruction, other
/// required parameters a neutral value.
pub fn fill_arguments(tool: &ToolSpec, instruction: &str) -> Value {
    let mut args = Map::new();
    for p in &tool.params {
        let value = match p.ty {
            ParamType::String => Value::String(instruction.to_string()),
            _ if !p.required => continue,
            ParamType::Number => Value::from(1),
            ParamType::Boolean => Value::Bool(false),
            ParamType::Enum => Value::String(p.choices.first().cloned().unwrap_or_default()),
            ParamType::Object => Value::Object(Map::new()),
        };
        args.insert(p.name.clone(), value);
    }
    Value::Object(args)
}

fn sample(probs: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = 0;
    for (i, p) in probs.iter().enumerate() {
        if *p > 0.0 {
            acc += p;
            last = i;
            if u < acc {
                return i;
            }
        }
    }
    last
}

impl Policy for ToyPolicy {
    fn decide(&self, input: &PolicyInput<'_>, rng: &mut ChaCha8Rng) -> PolicyDecision {
        if let Some(obs) = input.last_observation().filter(|o| !o.is_error) {
            return PolicyDecision::Answer {
                reasoning: "answering from the last observation".into(),
                answer: obs.payload.clone(),
            };
        }
        let mask = self.mask(input.task, input.full_catalog);
        if !mask.iter().any(|m| *m) {
            return PolicyDecision::answer(String::new());
        }
        let last_failed = input.last_observation().is_some();
        let features = self.features(input.task, input.turn_index, last_failed);
        let action = sample(&self.distribution(&features, &mask), rng);
        let tool = &input.full_catalog.tools()[action];
        PolicyDecision::Call {
            reasoning: format!("route to {}", tool.name),
            call: ToolCall::new(tool.name.clone(), fill_arguments(tool, &input.task.instruction)),
        }
    }
}
