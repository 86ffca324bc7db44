//! Task filtering: golden replay, bounded solvability probing and a
//! triviality check.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::env_sim::{normalize_text, verify, DomainOp, TaskSpec};
use crate::error::SynthError;
use crate::rollout::{run_episode, AnswerImmediately, Policy, PolicyDecision, PolicyInput, RolloutConfig};
use crate::seed::mix;
use crate::tool_registry::{ScriptedTool, ToolBinding, ToolCall, ToolCatalog};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterStage {
    /// Golden calls fail on the initial database.
    Replay,
    /// No probe attempt solved the task.
    Unsolvable,
    /// Answering without any action already solves the task.
    Trivial,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub attempts: usize,
    /// Chance that the probe replaces a golden call by a mutated one.
    pub perturb_prob: f64,
    pub max_turns: u32,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            attempts: 8,
            perturb_prob: 0.2,
            max_turns: crate::rollout::DEFAULT_MAX_TURNS,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SynthReport {
    pub generated: usize,
    pub dropped_exec_error: usize,
    pub dropped_pass_at_k: usize,
    pub dropped_no_action: usize,
    pub surviving: Vec<String>,
    pub drops: Vec<(String, FilterStage)>,
}

impl SynthReport {
    pub fn dropped(&self) -> usize {
        self.dropped_exec_error + self.dropped_pass_at_k + self.dropped_no_action
    }

    /// Every generated task is either surviving or dropped at exactly one stage.
    pub fn is_conserved(&self) -> bool {
        self.generated == self.surviving.len() + self.dropped() && self.drops.len() == self.dropped()
    }
}

/// The argument of `call` that identifies what the call operates on, and the
/// sorted values it can take in `task`'s database.
fn target(call: &ToolCall, catalog: &ToolCatalog, task: &TaskSpec) -> Option<(String, Vec<String>)> {
    let spec = catalog.get(&call.tool_name)?;
    let db = &task.initial_db;
    let keys = |table: &str| db.table(table).map(|t| t.keys().cloned().collect::<Vec<_>>()).unwrap_or_default();
    let field_values = |table: &str, field: &str| {
        let mut values: Vec<String> = db
            .table(table)
            .into_iter()
            .flatten()
            .flat_map(|(_, r)| match r.get(field) {
                Some(serde_json::Value::String(s)) => vec![s.clone()],
                Some(serde_json::Value::Array(items)) => items.iter().filter_map(|v| v.as_str().map(String::from)).collect(),
                _ => vec![],
            })
            .collect();
        values.sort_by_key(|v| normalize_text(v));
        values.dedup_by_key(|v| normalize_text(v));
        values
    };
    match spec.binding.as_ref()? {
        ToolBinding::Domain(op) => match op {
            DomainOp::Get { table, key_param }
            | DomainOp::SetField { table, key_param, .. }
            | DomainOp::Adjust { table, key_param, .. }
            | DomainOp::Insert { table, key_param, .. }
            | DomainOp::Delete { table, key_param } => Some((key_param.clone(), keys(table))),
            DomainOp::Transfer { table, from_param, .. } => Some((from_param.clone(), keys(table))),
            DomainOp::Search {
                table,
                field,
                value_param,
            } => Some((value_param.clone(), field_values(table, field))),
        },
        ToolBinding::Scripted(ScriptedTool::Answerer { table, query_field, .. }) => {
            Some(("query".to_string(), field_values(table, query_field)))
        }
        _ => None,
    }
}

/// Rewrites the identifying argument of `call` to the next existing value in
/// sorted order (wrapping around). Returns `None` for calls without such an
/// argument.
pub fn mutate_call(call: &ToolCall, catalog: &ToolCatalog, task: &TaskSpec) -> Option<ToolCall> {
    let (param, values) = target(call, catalog, task)?;
    if values.is_empty() {
        return None;
    }
    let current = call.arguments.get(&param).and_then(|v| v.as_str()).unwrap_or_default();
    let current = normalize_text(current);
    let next = match values.iter().position(|v| normalize_text(v) == current) {
        Some(i) => values[(i + 1) % values.len()].clone(),
        None => values.iter().find(|v| normalize_text(v) > current).unwrap_or(&values[0]).clone(),
    };
    if normalize_text(&next) == current {
        return None;
    }
    let mut out = call.clone();
    out.arguments.insert(param, serde_json::Value::String(next));
    Some(out)
}

/// Replays the golden calls, replacing each by a mutated call with probability
/// `perturb_prob`, then gives the reference answer.
#[derive(Clone, Copy, Debug)]
pub struct ProbePolicy {
    pub perturb_prob: f64,
}

impl Policy for ProbePolicy {
    fn decide(&self, input: &PolicyInput<'_>, rng: &mut ChaCha8Rng) -> PolicyDecision {
        match input.task.golden_calls.get(input.turn_index as usize) {
            Some(call) => {
                let perturb = rng.random_bool(self.perturb_prob.clamp(0.0, 1.0));
                let call = perturb
                    .then(|| mutate_call(call, input.full_catalog, input.task))
                    .flatten()
                    .unwrap_or_else(|| call.clone());
                PolicyDecision::Call {
                    reasoning: format!("step {}", input.turn_index + 1),
                    call,
                }
            }
            None => PolicyDecision::answer(input.task.golden_answer_text()),
        }
    }
}

fn stage_of(task: &TaskSpec, catalog: &ToolCatalog, cfg: &ProbeConfig) -> Result<Option<FilterStage>, SynthError> {
    let replay_ok = task.validate(catalog).is_ok()
        && task
            .instance_catalog(catalog)
            .is_ok_and(|view| task.replay_golden(&view).is_ok());
    if !replay_ok {
        return Ok(Some(FilterStage::Replay));
    }
    let probe = ProbePolicy {
        perturb_prob: cfg.perturb_prob,
    };
    let base = RolloutConfig::default().with_max_turns(cfg.max_turns);
    let mut solved = false;
    for j in 0..cfg.attempts {
        let run_cfg = base.clone().with_seed(mix(cfg.seed, j as u64));
        let traj = run_episode(&probe, task, catalog, &run_cfg)?;
        if verify(task, &traj, catalog)?.solved {
            solved = true;
            break;
        }
    }
    if !solved {
        return Ok(Some(FilterStage::Unsolvable));
    }
    let idle = AnswerImmediately(task.instruction.clone());
    let traj = run_episode(&idle, task, catalog, &base.clone().with_seed(cfg.seed))?;
    if verify(task, &traj, catalog)?.solved {
        return Ok(Some(FilterStage::Trivial));
    }
    Ok(None)
}

/// Applies the three filters in order; each task is dropped at the first
/// stage it fails.
pub fn filter_tasks(
    tasks: Vec<TaskSpec>,
    catalog: &ToolCatalog,
    cfg: &ProbeConfig,
) -> Result<(Vec<TaskSpec>, SynthReport), SynthError> {
    let stages: Vec<Option<FilterStage>> = tasks
        .par_iter()
        .map(|t| stage_of(t, catalog, cfg))
        .collect::<Result<_, _>>()?;
    let mut report = SynthReport {
        generated: tasks.len(),
        ..Default::default()
    };
    let mut kept = Vec::new();
    for (task, stage) in tasks.into_iter().zip(stages) {
        match stage {
            None => kept.push(task),
            Some(s) => {
                match s {
                    FilterStage::Replay => report.dropped_exec_error += 1,
                    FilterStage::Unsolvable => report.dropped_pass_at_k += 1,
                    FilterStage::Trivial => report.dropped_no_action += 1,
                }
                report.drops.push((task.task_id.clone(), s));
            }
        }
    }
    report.surviving = kept.iter().map(|t| t.task_id.clone()).collect();
    Ok((kept, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::domains::domain_template;
    use crate::synth::template::{generate_environment, generate_tasks};
    use serde_json::json;
    use std::sync::Arc;

    fn tasks() -> (Vec<TaskSpec>, ToolCatalog) {
        let t = domain_template("travel").unwrap();
        let (db, catalog) = generate_environment(&t, &Default::default(), 1).unwrap();
        (generate_tasks(&Arc::new(db), &catalog, &t, 12, 1).unwrap(), catalog)
    }

    #[test]
    fn well_formed_tasks_survive() {
        let (tasks, catalog) = tasks();
        let (kept, report) = filter_tasks(tasks.clone(), &catalog, &ProbeConfig::default()).unwrap();
        assert!(report.is_conserved());
        assert_eq!(kept.len(), tasks.len(), "{report:?}");
    }

    #[test]
    fn each_stage_drops_its_case() {
        let (tasks, catalog) = tasks();
        let mut broken = tasks[0].clone();
        broken.task_id = "broken".into();
        broken.golden_calls = vec![ToolCall::new("get_booking", json!({"booking_id": "B9999"}))];
        let mut capped = tasks[1].clone();
        capped.task_id = "capped".into();
        let mut trivial = tasks[2].clone();
        trivial.task_id = "trivial".into();
        // A no-op golden effect whose required information is already in the instruction.
        trivial.golden_calls.clear();
        trivial.gold_answer = None;
        trivial.required_info = trivial.instruction.clone();
        let cfg = ProbeConfig {
            max_turns: 1,
            ..Default::default()
        };
        let (_, report) = filter_tasks(vec![broken, trivial], &catalog, &ProbeConfig::default()).unwrap();
        assert_eq!(report.drops, vec![("broken".to_string(), FilterStage::Replay), ("trivial".to_string(), FilterStage::Trivial)]);
        // One turn is not enough to call the tool and then answer.
        let (_, report) = filter_tasks(vec![capped], &catalog, &cfg).unwrap();
        assert_eq!(report.dropped_pass_at_k, 1);
        assert!(report.is_conserved());
    }

    #[test]
    fn mutation_moves_to_the_next_key() {
        let (tasks, catalog) = tasks();
        let call = ToolCall::new("get_booking", json!({"booking_id": "B0001"}));
        let m = mutate_call(&call, &catalog, &tasks[0]).unwrap();
        assert_eq!(m.str_arg("booking_id"), Some("B0002"));
        let last = ToolCall::new("get_booking", json!({"booking_id": "B0300"}));
        assert_eq!(mutate_call(&last, &catalog, &tasks[0]).unwrap().str_arg("booking_id"), Some("B0001"));
        assert!(mutate_call(&ToolCall::new("calculate", json!({"expr": "1+1"})), &catalog, &tasks[0]).is_none());
    }
}
