use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::policy::{Message, Policy, PolicyDecision, PolicyInput};
use super::trajectory::{Totals, Trajectory, Turn};
use crate::env_sim::{EpisodeState, TaskSpec, TerminationReason};
use crate::error::{EnvError, RolloutError};
use crate::seed::mix;
use crate::tool_registry::{price_call, ModelClient, PricingEntry, TokenCounter, ToolCatalog, ToolResult};

/// Turn cap used when none is configured.
pub const DEFAULT_MAX_TURNS: u32 = 50;

fn default_max_turns() -> u32 {
    DEFAULT_MAX_TURNS
}

fn default_temperature() -> f64 {
    1.0
}

fn default_role() -> String {
    "environment".into()
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RolloutConfig {
    #[serde(default = "default_max_turns")]
    pub max_turns: u32,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    /// When false, reasoning and observation payloads are dropped from the
    /// returned trajectory; accounting is kept.
    #[serde(default = "yes")]
    pub record_transcript: bool,
    /// Role under which observations are appended to the history.
    #[serde(default = "default_role")]
    pub observation_role: String,
    /// Pricing of the policy itself, when it is a priced model.
    #[serde(default)]
    pub policy_pricing: Option<PricingEntry>,
    /// Seconds charged per turn for the policy's own generation.
    #[serde(default)]
    pub policy_latency_per_turn: f64,
    #[serde(default)]
    pub tokens: TokenCounter,
}

impl Default for RolloutConfig {
    fn default() -> Self {
        Self {
            max_turns: DEFAULT_MAX_TURNS,
            seed: 0,
            temperature: default_temperature(),
            record_transcript: true,
            observation_role: default_role(),
            policy_pricing: None,
            policy_latency_per_turn: 0.0,
            tokens: TokenCounter::default(),
        }
    }
}

impl RolloutConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_turns(mut self, max_turns: u32) -> Self {
        self.max_turns = max_turns;
        self
    }

    pub fn validate(&self) -> Result<(), RolloutError> {
        if self.max_turns < 1 {
            return Err(RolloutError::InvalidConfig("max_turns must be at least 1".into()));
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(RolloutError::InvalidConfig("temperature must be positive".into()));
        }
        if !(self.policy_latency_per_turn >= 0.0) {
            return Err(RolloutError::InvalidConfig("policy latency must be non-negative".into()));
        }
        if let Some(p) = &self.policy_pricing {
            p.validate().map_err(|e| RolloutError::InvalidConfig(e.to_string()))?;
        }
        Ok(())
    }
}

/// System prompt listing the instance's tools and the user's preferences.
pub fn system_prompt(task: &TaskSpec, catalog: &ToolCatalog) -> String {
    let mut out = String::from("You can call the following tools:\n");
    for tool in catalog.tools() {
        let params = serde_json::to_string(&tool.params).unwrap_or_default();
        out.push_str(&format!("- {}: {} parameters={params}\n", tool.name, tool.description));
    }
    out.push_str(
        "Reply with reasoning followed by exactly one <tool_call>{\"name\": ..., \"arguments\": {...}}</tool_call> \
         or one <answer>...</answer>.",
    );
    if let Some(p) = &task.preference {
        out.push_str(&format!("\nUser preference: {}", p.instruction));
    }
    out
}

/// Runs one episode of `policy` on `task`.
pub fn run_episode(
    policy: &dyn Policy,
    task: &TaskSpec,
    catalog: &ToolCatalog,
    cfg: &RolloutConfig,
) -> Result<Trajectory, RolloutError> {
    run_episode_with(policy, task, catalog, cfg, None)
}

/// As [`run_episode`], with a client for HTTP-bound tools.
pub fn run_episode_with(
    policy: &dyn Policy,
    task: &TaskSpec,
    catalog: &ToolCatalog,
    cfg: &RolloutConfig,
    model_client: Option<&dyn ModelClient>,
) -> Result<Trajectory, RolloutError> {
    cfg.validate()?;
    let missing: Vec<String> = task
        .available_tools
        .iter()
        .filter(|t| catalog.get(t).is_none())
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(RolloutError::UnavailableTools(missing));
    }
    let view = task.instance_catalog(catalog)?;
    let mut state = task.fork_initial_state();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut history = vec![
        Message {
            role: "system".into(),
            content: system_prompt(task, &view),
        },
        Message {
            role: "user".into(),
            content: task.instruction.clone(),
        },
    ];
    let preference = task.preference.as_ref().map(|p| p.vector.as_slice());
    let mut turns: Vec<Turn> = Vec::new();
    let mut totals = Totals {
        tool_counts: vec![0; catalog.len()],
        ..Totals::default()
    };
    let mut alignment = 0.0;

    for turn_index in 0..cfg.max_turns {
        let decision = {
            let input = PolicyInput {
                task,
                catalog: &view,
                full_catalog: catalog,
                history: &history,
                turns: &turns,
                turn_index,
                temperature: cfg.temperature,
            };
            policy.decide(&input, &mut rng)
        };
        let rendered = decision.render();
        let policy_cost = cfg.policy_pricing.as_ref().map_or(0.0, |p| {
            let prompt: String = history.iter().map(|m| m.content.as_str()).collect::<Vec<_>>().join("\n");
            price_call(p, cfg.tokens.count(&prompt), cfg.tokens.count(&rendered))
        });
        let mut turn = Turn {
            reasoning: decision.reasoning().to_string(),
            action: None,
            observation: None,
            final_answer: None,
            format_violation: None,
            policy_cost,
            policy_latency: cfg.policy_latency_per_turn,
        };
        history.push(Message {
            role: "assistant".into(),
            content: rendered,
        });
        match decision {
            PolicyDecision::Answer { answer, .. } => {
                turn.final_answer = Some(answer);
                state.terminate(TerminationReason::AnswerEmitted);
            }
            PolicyDecision::Malformed { raw, .. } => {
                turn.format_violation = Some(raw);
                state.terminate(TerminationReason::FormatViolation);
            }
            PolicyDecision::Call { call, .. } => match catalog.index_of(&call.tool_name) {
                None => {
                    turn.format_violation = Some(format!("unknown tool `{}`", call.tool_name));
                    state.terminate(TerminationReason::FormatViolation);
                }
                Some(idx) => {
                    let call = call.at_turn(turn_index);
                    let result = execute_turn(&mut state, task, &view, &call, cfg, turn_index, model_client)?;
                    totals.tool_counts[idx] += 1;
                    if let Some(p) = preference {
                        alignment += p.get(idx).copied().unwrap_or(0.0);
                    }
                    history.push(Message {
                        role: cfg.observation_role.clone(),
                        content: result.payload.clone(),
                    });
                    turn.action = Some(call);
                    turn.observation = Some(result);
                }
            },
        }
        totals.cost += turn.cost();
        totals.latency += turn.latency();
        turns.push(turn);
        if state.is_terminated() {
            break;
        }
    }
    if !state.is_terminated() {
        state.terminate(TerminationReason::MaxTurns);
    }
    if !cfg.record_transcript {
        for t in &mut turns {
            t.reasoning.clear();
            if let Some(o) = &mut t.observation {
                o.payload.clear();
            }
        }
    }
    Ok(Trajectory {
        task_id: task.task_id.clone(),
        turns,
        totals,
        termination_reason: state.termination_reason().unwrap_or(TerminationReason::MaxTurns),
        preference_alignment: alignment,
        outcome: None,
        max_turns: cfg.max_turns,
    })
}

fn execute_turn(
    state: &mut EpisodeState,
    task: &TaskSpec,
    view: &ToolCatalog,
    call: &crate::tool_registry::ToolCall,
    cfg: &RolloutConfig,
    turn_index: u32,
    model_client: Option<&dyn ModelClient>,
) -> Result<ToolResult, RolloutError> {
    if !task.is_available(&call.tool_name) {
        return Ok(ToolResult::rejected(format!(
            "tool `{}` is not available in this environment",
            call.tool_name
        )));
    }
    let seed = mix(cfg.seed, u64::from(turn_index) + 1);
    match state.apply_call_with(view, call, seed, cfg.tokens, model_client) {
        Ok(r) => Ok(r),
        Err(EnvError::Tool(e)) => Ok(ToolResult::rejected(e.to_string())),
        Err(e) => Err(e.into()),
    }
}

/// Runs `group_size` independent episodes of the same task. Episode `g` uses
/// seed `mix(cfg.seed, g)`; episodes run in parallel and are returned in order.
pub fn run_group(
    policy: &dyn Policy,
    task: &TaskSpec,
    catalog: &ToolCatalog,
    cfg: &RolloutConfig,
    group_size: usize,
) -> Result<Vec<Trajectory>, RolloutError> {
    if group_size < 2 {
        return Err(RolloutError::GroupTooSmall(group_size));
    }
    (0..group_size)
        .into_par_iter()
        .map(|g| {
            let episode_cfg = cfg.clone().with_seed(mix(cfg.seed, g as u64));
            run_episode(policy, task, catalog, &episode_cfg)
        })
        .collect()
}
