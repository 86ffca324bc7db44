use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::catalog::ToolCatalog;
use super::http::{ChatMessage, ChatRequest, HttpModelClient, ModelClient};
use super::pricing::{price_call, TokenCounter};
use super::spec::{ScriptedTool, ToolBinding};
use crate::env_sim::{normalize_text, EpisodeState};
use crate::error::ToolError;
use crate::seed::hash_seed;

/// A tool invocation issued by a policy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToolCall {
    pub tool_name: String,
    #[serde(default)]
    pub arguments: Map<String, Value>,
    #[serde(default)]
    pub issued_at_turn: u32,
}

impl ToolCall {
    /// Builds a call from a JSON object of arguments; non-objects yield no arguments.
    pub fn new(tool_name: impl Into<String>, arguments: Value) -> Self {
        let arguments = match arguments {
            Value::Object(map) => map,
            _ => Map::new(),
        };
        Self {
            tool_name: tool_name.into(),
            arguments,
            issued_at_turn: 0,
        }
    }

    pub fn at_turn(mut self, turn: u32) -> Self {
        self.issued_at_turn = turn;
        self
    }

    pub fn str_arg(&self, name: &str) -> Option<&str> {
        self.arguments.get(name).and_then(Value::as_str)
    }

    /// Stable byte encoding of the tool name and arguments (turn excluded).
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = self.tool_name.clone().into_bytes();
        out.push(b'\n');
        out.extend(serde_json::to_vec(&self.arguments).unwrap_or_default());
        out
    }

    /// Whitespace-joined argument text, used for input token estimates.
    pub fn argument_text(&self) -> String {
        self.arguments
            .values()
            .map(|v| match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn is_false(b: &bool) -> bool {
    !*b
}

/// Observation returned by a tool, with cost and latency accounting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToolResult {
    pub payload: String,
    pub tokens_in: u64,
    pub tokens_out: u64,
    /// Dollars.
    pub cost: f64,
    /// Seconds.
    pub latency: f64,
    pub is_error: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error_detail: Option<String>,
    /// Set when the environment signals the end of the episode.
    #[serde(default, skip_serializing_if = "is_false")]
    pub terminal: bool,
}

impl ToolResult {
    /// An error observation that consumed nothing (e.g. a routing failure).
    pub fn rejected(detail: impl Into<String>) -> Self {
        let detail = detail.into();
        Self {
            payload: format!("error: {detail}"),
            tokens_in: 0,
            tokens_out: 0,
            cost: 0.0,
            latency: 0.0,
            is_error: true,
            error_detail: Some(detail),
            terminal: false,
        }
    }
}

/// Mutable context a call executes in.
pub struct ExecContext<'a> {
    /// Seed mixed with the call encoding for any randomness (answer noise, jitter).
    pub seed: u64,
    pub tokens: TokenCounter,
    pub episode: Option<&'a mut EpisodeState>,
    pub model_client: Option<&'a dyn ModelClient>,
}

impl<'a> ExecContext<'a> {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            tokens: TokenCounter::default(),
            episode: None,
            model_client: None,
        }
    }

    pub fn with_episode(mut self, episode: &'a mut EpisodeState) -> Self {
        self.episode = Some(episode);
        self
    }
}

struct Execution {
    payload: String,
    error: Option<String>,
    extra_tokens_out: u64,
    reported_usage: Option<(u64, u64)>,
    measured_latency: Option<f64>,
    terminal: bool,
}

impl Execution {
    fn ok(payload: String) -> Self {
        Self {
            payload,
            error: None,
            extra_tokens_out: 0,
            reported_usage: None,
            measured_latency: None,
            terminal: false,
        }
    }

    fn failed(detail: String) -> Self {
        Self {
            payload: format!("error: {detail}"),
            error: Some(detail),
            ..Self::ok(String::new())
        }
    }
}

/// Runs `call` against `catalog`.
///
/// Routing and schema problems are returned as errors. Failures inside the
/// executor produce a [`ToolResult`] with `is_error` set so the observation can
/// flow back to the policy.
pub fn execute(
    catalog: &ToolCatalog,
    call: &ToolCall,
    ctx: &mut ExecContext<'_>,
) -> Result<ToolResult, ToolError> {
    let spec = catalog
        .get(&call.tool_name)
        .ok_or_else(|| ToolError::UnknownTool(call.tool_name.clone()))?;
    spec.validate_arguments(&call.arguments)?;
    let pricing = *catalog.pricing_for(spec)?;
    let latency_model = *catalog.latency_for(spec)?;
    let call_seed = hash_seed(ctx.seed, &call.canonical_bytes());

    let exec = match &spec.binding {
        None => return Err(ToolError::Unbound(spec.name.clone())),
        Some(ToolBinding::Domain(op)) => {
            let episode = ctx
                .episode
                .as_deref_mut()
                .ok_or_else(|| ToolError::Unbound(spec.name.clone()))?;
            match episode.run_domain_op(op, call) {
                Ok(payload) => Execution::ok(payload),
                Err(detail) => Execution::failed(detail),
            }
        }
        Some(ToolBinding::Scripted(script)) => {
            run_scripted(script, call, ctx.episode.as_deref_mut(), call_seed)
        }
        Some(ToolBinding::Http(endpoint)) => {
            let prompt = call
                .str_arg("prompt")
                .map(str::to_string)
                .unwrap_or_else(|| Value::Object(call.arguments.clone()).to_string());
            let request = ChatRequest {
                model: endpoint.model.clone(),
                messages: vec![ChatMessage::new("user", prompt)],
            };
            let started = Instant::now();
            let response = match ctx.model_client {
                Some(client) => client.complete(endpoint, &request),
                None => HttpModelClient::default().complete(endpoint, &request),
            };
            let elapsed = started.elapsed().as_secs_f64();
            match response {
                Ok(r) => Execution {
                    reported_usage: Some((r.usage.prompt_tokens, r.usage.completion_tokens)),
                    measured_latency: Some(elapsed),
                    ..Execution::ok(r.content)
                },
                Err(e) => Execution {
                    measured_latency: Some(elapsed),
                    ..Execution::failed(e.to_string())
                },
            }
        }
    };

    let (tokens_in, tokens_out) = exec.reported_usage.unwrap_or_else(|| {
        (
            ctx.tokens.count(&call.argument_text()),
            ctx.tokens.count(&exec.payload) + exec.extra_tokens_out,
        )
    });
    let latency = exec
        .measured_latency
        .unwrap_or_else(|| latency_model.latency(tokens_out, call_seed));
    Ok(ToolResult {
        cost: price_call(&pricing, tokens_in, tokens_out),
        latency,
        tokens_in,
        tokens_out,
        is_error: exec.error.is_some(),
        error_detail: exec.error,
        terminal: exec.terminal,
        payload: exec.payload,
    })
}

fn run_scripted(
    script: &ScriptedTool,
    call: &ToolCall,
    episode: Option<&mut EpisodeState>,
    call_seed: u64,
) -> Execution {
    match script {
        ScriptedTool::Calculator => {
            let expr = call.str_arg("expr").unwrap_or_default();
            match evalexpr::eval(expr) {
                Ok(v) => Execution::ok(v.to_string()),
                Err(e) => Execution::failed(format!("cannot evaluate `{expr}`: {e}")),
            }
        }
        ScriptedTool::Echo { payload } => Execution::ok(payload.clone()),
        ScriptedTool::Terminate { message } => Execution {
            terminal: true,
            ..Execution::ok(message.clone())
        },
        ScriptedTool::Answerer {
            table,
            query_field,
            answer_field,
            accuracy,
            extra_output_tokens,
        } => {
            let Some(episode) = episode else {
                return Execution::failed("answerer has no knowledge source".into());
            };
            let query = normalize_text(call.str_arg("query").unwrap_or_default());
            let Some((key, answer, distractor)) =
                episode.lookup_answer(table, query_field, answer_field, &query)
            else {
                return Execution {
                    extra_tokens_out: *extra_output_tokens,
                    ..Execution::ok("no answer found".into())
                };
            };
            let mut rng = ChaCha8Rng::seed_from_u64(call_seed);
            let correct = rng.random::<f64>() < *accuracy;
            let payload = if correct {
                answer
            } else {
                distractor.unwrap_or_else(|| "unknown".to_string())
            };
            episode.touch(table, &key);
            Execution {
                extra_tokens_out: *extra_output_tokens,
                ..Execution::ok(payload)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use serde_json::json;

    use super::*;
    use crate::tool_registry::{LatencyModel, ParamSpec, ParamType, PricingEntry, ToolKind, ToolSpec};

    fn calculator_catalog() -> ToolCatalog {
        let mut c = ToolCatalog::new(
            BTreeMap::from([("calc".to_string(), PricingEntry::per_token(2.0, 8.0))]),
            BTreeMap::from([("fast".to_string(), LatencyModel::constant(0.25))]),
        )
        .unwrap();
        c.register(ToolSpec {
            name: "calculator".into(),
            description: "Evaluates arithmetic".into(),
            params: vec![ParamSpec::required("expr", ParamType::String, "expression")],
            kind: ToolKind::CodeInterpreter,
            pricing_ref: "calc".into(),
            latency_ref: "fast".into(),
            binding: Some(ToolBinding::Scripted(ScriptedTool::Calculator)),
        })
        .unwrap();
        c
    }

    #[test]
    fn calculator_adds() {
        let c = calculator_catalog();
        let call = ToolCall::new("calculator", json!({"expr": "2+3"}));
        let r = execute(&c, &call, &mut ExecContext::new(1)).unwrap();
        assert_eq!(r.payload, "5");
        assert!(!r.is_error);
        assert_eq!(r.tokens_in, 2);
        assert_eq!(r.tokens_out, 2);
        assert_eq!(r.cost, price_call(&PricingEntry::per_token(2.0, 8.0), 2, 2));
        assert_eq!(r.latency, 0.25);
    }

    #[test]
    fn routing_and_schema_errors() {
        let c = calculator_catalog();
        let missing = ToolCall::new("web_search", json!({"query": "x"}));
        assert!(matches!(
            execute(&c, &missing, &mut ExecContext::new(1)),
            Err(ToolError::UnknownTool(_))
        ));
        let bad = ToolCall::new("calculator", json!({"expr": 7}));
        match execute(&c, &bad, &mut ExecContext::new(1)) {
            Err(ToolError::Argument { param, .. }) => assert_eq!(param, "expr"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn executor_failure_is_an_observation() {
        let c = calculator_catalog();
        let call = ToolCall::new("calculator", json!({"expr": "2+"}));
        let r = execute(&c, &call, &mut ExecContext::new(1)).unwrap();
        assert!(r.is_error);
        assert!(r.error_detail.is_some());
        assert_eq!(r.cost, price_call(&PricingEntry::per_token(2.0, 8.0), r.tokens_in, r.tokens_out));
    }

    #[test]
    fn identical_seed_and_call_give_identical_results() {
        let c = calculator_catalog();
        let call = ToolCall::new("calculator", json!({"expr": "6*7"}));
        let a = execute(&c, &call, &mut ExecContext::new(9)).unwrap();
        let b = execute(&c, &call, &mut ExecContext::new(9)).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
