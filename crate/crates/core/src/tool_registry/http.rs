//! Minimal chat-completions-shaped adapter for model endpoints.
//!
//! Request: `{model, messages: [{role, content}]}`.
//! Response: `{content, usage: {prompt_tokens, completion_tokens}}`.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::ToolError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub model: String,
    pub url: String,
    /// Name of the environment variable holding a bearer token, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub api_key_env: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: impl Into<String>, content: impl Into<String>) -> Self {
        Self {
            role: role.into(),
            content: content.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatResponse {
    pub content: String,
    #[serde(default)]
    pub usage: Usage,
}

pub trait ModelClient: Send + Sync {
    fn complete(&self, endpoint: &EndpointConfig, request: &ChatRequest) -> Result<ChatResponse, ToolError>;
}

pub struct HttpModelClient {
    client: reqwest::blocking::Client,
}

impl Default for HttpModelClient {
    fn default() -> Self {
        Self::with_timeout(Duration::from_secs(120))
    }
}

impl HttpModelClient {
    pub fn with_timeout(timeout: Duration) -> Self {
        let client = reqwest::blocking::Client::builder()
            .timeout(timeout)
            .build()
            .expect("http client construction");
        Self { client }
    }
}

impl ModelClient for HttpModelClient {
    fn complete(&self, endpoint: &EndpointConfig, request: &ChatRequest) -> Result<ChatResponse, ToolError> {
        let mut builder = self.client.post(&endpoint.url).json(request);
        if let Some(var) = &endpoint.api_key_env {
            let key = std::env::var(var)
                .map_err(|_| ToolError::Endpoint(format!("environment variable {var} is not set")))?;
            builder = builder.bearer_auth(key);
        }
        let response = builder
            .send()
            .map_err(|e| ToolError::Endpoint(e.to_string()))?;
        let status = response.status();
        if !status.is_success() {
            return Err(ToolError::Endpoint(format!("{} returned {status}", endpoint.url)));
        }
        response
            .json::<ChatResponse>()
            .map_err(|e| ToolError::Endpoint(format!("malformed response: {e}")))
    }
}
