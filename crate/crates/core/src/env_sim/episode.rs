use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::db::{normalize_text, DomainDb};
use super::ops::{self, DomainOp};
use crate::error::EnvError;
use crate::tool_registry::{execute, ExecContext, ModelClient, TokenCounter, ToolCall, ToolCatalog, ToolResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    EnvSignal,
    MaxTurns,
    AnswerEmitted,
    FormatViolation,
}

/// Live state of one episode: a private copy of the database plus bookkeeping.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeState {
    pub task_id: String,
    pub db: DomainDb,
    touched: BTreeSet<(String, String)>,
    transcript: String,
    terminated: bool,
    termination_reason: Option<TerminationReason>,
}

impl EpisodeState {
    pub fn new(task_id: impl Into<String>, db: DomainDb) -> Self {
        Self {
            task_id: task_id.into(),
            db,
            touched: BTreeSet::new(),
            transcript: String::new(),
            terminated: false,
            termination_reason: None,
        }
    }

    /// Every `(table, key)` read or written so far.
    pub fn touched(&self) -> &BTreeSet<(String, String)> {
        &self.touched
    }

    pub fn transcript(&self) -> &str {
        &self.transcript
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    pub fn termination_reason(&self) -> Option<TerminationReason> {
        self.termination_reason
    }

    /// Marks the episode finished. The first reason recorded wins.
    pub fn terminate(&mut self, reason: TerminationReason) {
        if !self.terminated {
            self.terminated = true;
            self.termination_reason = Some(reason);
        }
    }

    pub fn touch(&mut self, table: &str, key: &str) {
        self.touched.insert((table.to_string(), key.to_string()));
    }

    /// Runs a domain operation transactionally. On error the database is unchanged
    /// and nothing is marked touched.
    pub fn run_domain_op(&mut self, op: &DomainOp, call: &ToolCall) -> Result<String, String> {
        if self.terminated {
            return Err("episode already terminated".into());
        }
        let outcome = ops::apply(&mut self.db, op, call)?;
        if outcome.wrote {
            self.db.version_counter += 1;
        }
        self.touched.extend(outcome.touched);
        Ok(outcome.payload)
    }

    /// Finds the record of `table` whose `query_field` matches the normalized
    /// query (exactly, or as a contained phrase) and returns its key, its answer,
    /// and a wrong answer taken from the next record in key order.
    pub fn lookup_answer(
        &self,
        table: &str,
        query_field: &str,
        answer_field: &str,
        normalized_query: &str,
    ) -> Option<(String, String, Option<String>)> {
        let records = self.db.table(table)?;
        let text_of = |v: Option<&Value>| match v {
            Some(Value::String(s)) => normalize_text(s),
            Some(other) => other.to_string(),
            None => String::new(),
        };
        let keys: Vec<&String> = records.keys().collect();
        let hit = keys
            .iter()
            .position(|k| text_of(records[*k].get(query_field)) == normalized_query)
            .or_else(|| {
                keys.iter().position(|k| {
                    let q = text_of(records[*k].get(query_field));
                    !q.is_empty() && normalized_query.contains(&q)
                })
            })?;
        let raw = |k: &String| match records[k].get(answer_field) {
            Some(Value::String(s)) => s.clone(),
            Some(other) => other.to_string(),
            None => String::new(),
        };
        let answer = raw(keys[hit]);
        let distractor = (keys.len() > 1)
            .then(|| raw(keys[(hit + 1) % keys.len()]))
            .filter(|d| normalize_text(d) != normalize_text(&answer));
        Some((keys[hit].clone(), answer, distractor))
    }

    /// Executes `call` against this episode and records the observation.
    pub fn apply_call(
        &mut self,
        catalog: &ToolCatalog,
        call: &ToolCall,
        seed: u64,
    ) -> Result<ToolResult, EnvError> {
        self.apply_call_with(catalog, call, seed, TokenCounter::default(), None)
    }

    pub fn apply_call_with(
        &mut self,
        catalog: &ToolCatalog,
        call: &ToolCall,
        seed: u64,
        tokens: TokenCounter,
        model_client: Option<&dyn ModelClient>,
    ) -> Result<ToolResult, EnvError> {
        if self.terminated {
            return Err(EnvError::Terminated);
        }
        let result = {
            let mut ctx = ExecContext {
                seed,
                tokens,
                episode: Some(&mut *self),
                model_client,
            };
            execute(catalog, call, &mut ctx)?
        };
        if !self.transcript.is_empty() {
            self.transcript.push('\n');
        }
        self.transcript.push_str(&result.payload);
        if result.terminal {
            self.terminate(TerminationReason::EnvSignal);
        }
        Ok(result)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use std::collections::BTreeMap;

    use serde_json::json;

    use super::*;
    use crate::env_sim::db::tests::travel_db;
    use crate::env_sim::ops::{Guard, ValueSource};
    use crate::tool_registry::{LatencyModel, ParamSpec, ParamType, PricingEntry, ScriptedTool, ToolBinding, ToolKind, ToolSpec};

    pub(crate) fn travel_catalog() -> ToolCatalog {
        let tool = |name: &str, param: &str, op: DomainOp| ToolSpec {
            name: name.into(),
            description: format!("{name} over the travel database"),
            params: vec![ParamSpec::required(param, ParamType::String, "record id")],
            kind: ToolKind::DomainFunction,
            pricing_ref: "db".into(),
            latency_ref: "db".into(),
            binding: Some(ToolBinding::Domain(op)),
        };
        let mut c = ToolCatalog::new(
            BTreeMap::from([("db".to_string(), PricingEntry::free())]),
            BTreeMap::from([("db".to_string(), LatencyModel::constant(0.1))]),
        )
        .unwrap();
        c.register(tool(
            "get_flight_status",
            "flight_id",
            DomainOp::Get {
                table: "flights".into(),
                key_param: "flight_id".into(),
            },
        ))
        .unwrap();
        c.register(tool(
            "cancel_booking",
            "booking_id",
            DomainOp::SetField {
                table: "bookings".into(),
                key_param: "booking_id".into(),
                field: "status".into(),
                value: ValueSource::Fixed(json!("cancelled")),
                guard: Some(Guard {
                    field: "status".into(),
                    not_in: vec![json!("cancelled")],
                }),
            },
        ))
        .unwrap();
        c.register(ToolSpec {
            name: "hang_up".into(),
            description: "Ends the conversation".into(),
            params: vec![],
            kind: ToolKind::DomainFunction,
            pricing_ref: "db".into(),
            latency_ref: "db".into(),
            binding: Some(ToolBinding::Scripted(ScriptedTool::Terminate {
                message: "bye".into(),
            })),
        })
        .unwrap();
        c
    }

    #[test]
    fn cancel_booking_mutates_and_touches() {
        let catalog = travel_catalog();
        let mut state = EpisodeState::new("t", travel_db());
        let r = state
            .apply_call(&catalog, &ToolCall::new("cancel_booking", json!({"booking_id": "B1"})), 0)
            .unwrap();
        assert!(!r.is_error);
        assert_eq!(state.db.get("bookings", "B1").unwrap()["status"], json!("cancelled"));
        assert!(state.touched().contains(&("bookings".to_string(), "B1".to_string())));
        assert_eq!(state.db.version_counter, 1);
    }

    #[test]
    fn reads_touch_without_writing() {
        let catalog = travel_catalog();
        let fixture = travel_db();
        let mut state = EpisodeState::new("t", fixture.clone());
        let r = state
            .apply_call(&catalog, &ToolCall::new("get_flight_status", json!({"flight_id": "F200"})), 0)
            .unwrap();
        let expected: serde_json::Map<String, Value> = fixture.get("flights", "F200").unwrap().clone();
        let got: serde_json::Map<String, Value> = serde_json::from_str(&r.payload).unwrap();
        assert_eq!(got, expected);
        assert_eq!(state.db.version_counter, 0);
        assert_eq!(state.touched().len(), 1);
    }

    #[test]
    fn failed_write_leaves_db_byte_identical() {
        let catalog = travel_catalog();
        let mut state = EpisodeState::new("t", travel_db());
        let before = serde_json::to_vec(&state.db).unwrap();
        let r = state
            .apply_call(&catalog, &ToolCall::new("cancel_booking", json!({"booking_id": "B404"})), 0)
            .unwrap();
        assert!(r.is_error);
        assert_eq!(serde_json::to_vec(&state.db).unwrap(), before);
        assert!(state.touched().is_empty());
    }

    #[test]
    fn terminal_observation_ends_episode() {
        let catalog = travel_catalog();
        let mut state = EpisodeState::new("t", travel_db());
        state.apply_call(&catalog, &ToolCall::new("hang_up", json!({})), 0).unwrap();
        assert_eq!(state.termination_reason(), Some(TerminationReason::EnvSignal));
        let again = state.apply_call(&catalog, &ToolCall::new("get_flight_status", json!({"flight_id": "F100"})), 0);
        assert!(matches!(again, Err(EnvError::Terminated)));
    }
}
