use serde::{Deserialize, Serialize};

use crate::env_sim::DomainOp;
use crate::error::ToolError;
use crate::tool_registry::http::EndpointConfig;

/// Semantic type tag of a tool parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamType {
    String,
    Number,
    Boolean,
    Enum,
    Object,
}

impl ParamType {
    pub fn accepts(self, value: &serde_json::Value) -> bool {
        use serde_json::Value;
        match self {
            ParamType::String | ParamType::Enum => matches!(value, Value::String(_)),
            ParamType::Number => matches!(value, Value::Number(_)),
            ParamType::Boolean => matches!(value, Value::Bool(_)),
            ParamType::Object => matches!(value, Value::Object(_)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamSpec {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: ParamType,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub required: bool,
    /// Allowed values when `ty` is [`ParamType::Enum`].
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub choices: Vec<String>,
}

impl ParamSpec {
    pub fn required(name: &str, ty: ParamType, description: &str) -> Self {
        Self {
            name: name.to_string(),
            ty,
            description: description.to_string(),
            required: true,
            choices: Vec::new(),
        }
    }

    pub fn optional(name: &str, ty: ParamType, description: &str) -> Self {
        Self {
            required: false,
            ..Self::required(name, ty, description)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToolKind {
    DomainFunction,
    Search,
    CodeInterpreter,
    ModelEndpoint,
}

/// Deterministic stand-ins for tools that would otherwise need external services.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "script", rename_all = "snake_case")]
pub enum ScriptedTool {
    /// Evaluates the arithmetic expression in `expr`.
    Calculator,
    /// Looks up the record of `table` whose `query_field` occurs in the `query`
    /// argument and answers with its `answer_field`, correctly with probability
    /// `accuracy`. `extra_output_tokens` models hidden generation (e.g. reasoning)
    /// that is billed but not returned.
    Answerer {
        table: String,
        query_field: String,
        answer_field: String,
        accuracy: f64,
        #[serde(default)]
        extra_output_tokens: u64,
    },
    /// Ends the episode with an environment signal.
    Terminate { message: String },
    /// Returns a fixed payload.
    Echo { payload: String },
}

/// What actually runs when a tool is called.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToolBinding {
    Domain(DomainOp),
    Scripted(ScriptedTool),
    Http(EndpointConfig),
}

/// One tool object of a catalog.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToolSpec {
    pub name: String,
    pub description: String,
    #[serde(rename = "parameters", default)]
    pub params: Vec<ParamSpec>,
    pub kind: ToolKind,
    pub pricing_ref: String,
    pub latency_ref: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub binding: Option<ToolBinding>,
}

impl ToolSpec {
    pub fn param(&self, name: &str) -> Option<&ParamSpec> {
        self.params.iter().find(|p| p.name == name)
    }

    /// Checks the parameter schema, returning the names of offending params.
    pub fn validate_schema(&self) -> Result<(), ToolError> {
        let mut bad = Vec::new();
        if self.name.trim().is_empty() {
            bad.push("<tool name>".to_string());
        }
        for (i, p) in self.params.iter().enumerate() {
            if p.name.trim().is_empty() {
                bad.push(format!("#{i} (empty name)"));
            } else if self.params[..i].iter().any(|q| q.name == p.name) {
                bad.push(format!("{} (duplicate)", p.name));
            } else if p.ty == ParamType::Enum && p.choices.is_empty() {
                bad.push(format!("{} (enum without choices)", p.name));
            }
        }
        if self.kind == ToolKind::ModelEndpoint
            && !self
                .description
                .starts_with(super::description::DESCRIPTION_HEADER)
        {
            bad.push("<description> (model endpoint description must follow the description protocol)".to_string());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(ToolError::InvalidSchema {
                tool: self.name.clone(),
                params: bad,
            })
        }
    }

    /// Validates call arguments against the parameter schema.
    pub fn validate_arguments(
        &self,
        arguments: &serde_json::Map<String, serde_json::Value>,
    ) -> Result<(), ToolError> {
        let err = |param: &str, reason: String| ToolError::Argument {
            tool: self.name.clone(),
            param: param.to_string(),
            reason,
        };
        for p in &self.params {
            match arguments.get(&p.name) {
                None | Some(serde_json::Value::Null) if p.required => {
                    return Err(err(&p.name, "is required".into()));
                }
                None | Some(serde_json::Value::Null) => {}
                Some(v) if !p.ty.accepts(v) => {
                    return Err(err(&p.name, format!("expected {:?}, got {v}", p.ty)));
                }
                Some(serde_json::Value::String(s))
                    if p.ty == ParamType::Enum && !p.choices.iter().any(|c| c == s) =>
                {
                    return Err(err(&p.name, format!("`{s}` is not one of {:?}", p.choices)));
                }
                Some(_) => {}
            }
        }
        if let Some(extra) = arguments.keys().find(|k| self.param(k).is_none()) {
            return Err(err(extra, "is not a declared parameter".into()));
        }
        Ok(())
    }
}
