use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::trajectory::Turn;
use crate::env_sim::TaskSpec;
use crate::tool_registry::{ChatMessage, ChatRequest, EndpointConfig, ModelClient, ToolCall, ToolCatalog, ToolResult};

/// A chat-style history entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: String,
    pub content: String,
}

/// Everything a policy sees when choosing its next step.
pub struct PolicyInput<'a> {
    pub task: &'a TaskSpec,
    /// Catalog restricted to the tools of this instance.
    pub catalog: &'a ToolCatalog,
    /// The full catalog that metric and preference vectors are indexed by.
    pub full_catalog: &'a ToolCatalog,
    pub history: &'a [Message],
    pub turns: &'a [Turn],
    pub turn_index: u32,
    pub temperature: f64,
}

impl PolicyInput<'_> {
    pub fn last_observation(&self) -> Option<&ToolResult> {
        self.turns.last().and_then(|t| t.observation.as_ref())
    }

    pub fn preference_text(&self) -> Option<&str> {
        self.task.preference.as_ref().map(|p| p.instruction.as_str())
    }
}

/// Output of one policy step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolicyDecision {
    Call { reasoning: String, call: ToolCall },
    Answer { reasoning: String, answer: String },
    /// Output that parsed as neither exactly one action nor one answer.
    Malformed { reasoning: String, raw: String },
}

impl PolicyDecision {
    pub fn call(tool: &str, arguments: Value) -> Self {
        Self::Call {
            reasoning: String::new(),
            call: ToolCall::new(tool, arguments),
        }
    }

    pub fn answer(answer: impl Into<String>) -> Self {
        Self::Answer {
            reasoning: String::new(),
            answer: answer.into(),
        }
    }

    pub fn reasoning(&self) -> &str {
        match self {
            Self::Call { reasoning, .. } | Self::Answer { reasoning, .. } | Self::Malformed { reasoning, .. } => {
                reasoning
            }
        }
    }

    /// Text form of the step as it appears in the history.
    pub fn render(&self) -> String {
        let mut out = self.reasoning().to_string();
        if !out.is_empty() {
            out.push('\n');
        }
        match self {
            Self::Call { call, .. } => {
                let body = serde_json::json!({"name": call.tool_name, "arguments": call.arguments});
                out.push_str(&format!("<tool_call>{body}</tool_call>"));
            }
            Self::Answer { answer, .. } => out.push_str(&format!("<answer>{answer}</answer>")),
            Self::Malformed { raw, .. } => out.push_str(raw),
        }
        out
    }
}

/// A decision-making policy. Implementations must be shareable across
/// concurrently running episodes; all randomness comes from `rng`.
pub trait Policy: Sync {
    fn decide(&self, input: &PolicyInput<'_>, rng: &mut ChaCha8Rng) -> PolicyDecision;
}

fn between<'a>(text: &'a str, open: &str, close: &str) -> Vec<(usize, &'a str)> {
    let mut out = Vec::new();
    let mut rest = 0;
    while let Some(start) = text[rest..].find(open) {
        let begin = rest + start + open.len();
        match text[begin..].find(close) {
            Some(end) => {
                out.push((rest + start, &text[begin..begin + end]));
                rest = begin + end + close.len();
            }
            None => {
                out.push((rest + start, ""));
                break;
            }
        }
    }
    out
}

/// Parses model text into a decision. The text must contain exactly one
/// `<tool_call>{"name": .., "arguments": {..}}</tool_call>` block or exactly one
/// `<answer>..</answer>` block; text before the block is the reasoning.
pub fn parse_response(text: &str) -> PolicyDecision {
    let calls = between(text, "<tool_call>", "</tool_call>");
    let answers = between(text, "<answer>", "</answer>");
    let malformed = || PolicyDecision::Malformed {
        reasoning: String::new(),
        raw: text.to_string(),
    };
    let balanced = |open: &str, close: &str| text.matches(open).count() == text.matches(close).count();
    if !balanced("<tool_call>", "</tool_call>") || !balanced("<answer>", "</answer>") {
        return malformed();
    }
    match (calls.as_slice(), answers.as_slice()) {
        ([(at, body)], []) => {
            let reasoning = text[..*at].trim().to_string();
            let parsed: Option<(String, Value)> = serde_json::from_str::<Value>(body.trim()).ok().and_then(|v| {
                let name = v.get("name")?.as_str()?.to_string();
                let args = v.get("arguments").cloned().unwrap_or(Value::Object(Default::default()));
                args.is_object().then_some((name, args))
            });
            match parsed {
                Some((name, args)) => PolicyDecision::Call {
                    reasoning,
                    call: ToolCall::new(name, args),
                },
                None => PolicyDecision::Malformed {
                    reasoning,
                    raw: text.to_string(),
                },
            }
        }
        ([], [(at, body)]) => PolicyDecision::Answer {
            reasoning: text[..*at].trim().to_string(),
            answer: body.trim().to_string(),
        },
        _ => malformed(),
    }
}

/// Answers immediately with a fixed string.
#[derive(Clone, Debug)]
pub struct AnswerImmediately(pub String);

impl Policy for AnswerImmediately {
    fn decide(&self, _: &PolicyInput<'_>, _: &mut ChaCha8Rng) -> PolicyDecision {
        PolicyDecision::answer(self.0.clone())
    }
}

/// Issues the same call forever.
#[derive(Clone, Debug)]
pub struct NeverAnswer {
    pub call: ToolCall,
}

impl Policy for NeverAnswer {
    fn decide(&self, _: &PolicyInput<'_>, _: &mut ChaCha8Rng) -> PolicyDecision {
        PolicyDecision::Call {
            reasoning: "keep looking".into(),
            call: self.call.clone(),
        }
    }
}

/// Replays the task's golden calls, then answers with the reference answer.
#[derive(Clone, Copy, Debug, Default)]
pub struct GoldenReplay;

impl Policy for GoldenReplay {
    fn decide(&self, input: &PolicyInput<'_>, _: &mut ChaCha8Rng) -> PolicyDecision {
        match input.task.golden_calls.get(input.turn_index as usize) {
            Some(call) => PolicyDecision::Call {
                reasoning: format!("step {}", input.turn_index + 1),
                call: call.clone(),
            },
            None => PolicyDecision::Answer {
                reasoning: String::new(),
                answer: input.task.golden_answer_text(),
            },
        }
    }
}

/// Plays a fixed list of decisions, then answers with `fallback`.
#[derive(Clone, Debug)]
pub struct Scripted {
    pub steps: Vec<PolicyDecision>,
    pub fallback: String,
}

impl Policy for Scripted {
    fn decide(&self, input: &PolicyInput<'_>, _: &mut ChaCha8Rng) -> PolicyDecision {
        self.steps
            .get(input.turn_index as usize)
            .cloned()
            .unwrap_or_else(|| PolicyDecision::answer(self.fallback.clone()))
    }
}

/// Wraps a function from history to raw text, parsed by [`parse_response`].
pub struct TextPolicy<F>(pub F);

impl<F> Policy for TextPolicy<F>
where
    F: Fn(&[Message]) -> String + Sync,
{
    fn decide(&self, input: &PolicyInput<'_>, _: &mut ChaCha8Rng) -> PolicyDecision {
        parse_response(&(self.0)(input.history))
    }
}

/// A policy served by a chat-completions endpoint.
pub struct EndpointPolicy<C> {
    pub endpoint: EndpointConfig,
    pub client: C,
}

impl<C: ModelClient> Policy for EndpointPolicy<C> {
    fn decide(&self, input: &PolicyInput<'_>, _: &mut ChaCha8Rng) -> PolicyDecision {
        let request = ChatRequest {
            model: self.endpoint.model.clone(),
            messages: input
                .history
                .iter()
                .map(|m| ChatMessage::new(m.role.clone(), m.content.clone()))
                .collect(),
        };
        match self.client.complete(&self.endpoint, &request) {
            Ok(r) => parse_response(&r.content),
            Err(e) => PolicyDecision::Malformed {
                reasoning: String::new(),
                raw: format!("endpoint error: {e}"),
            },
        }
    }
}
