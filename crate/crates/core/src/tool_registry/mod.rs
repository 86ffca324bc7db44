//! Unified tool interface: catalogs, pricing, latency and executors.
//!
//! Every tool, whether a domain function, a search backend, a code
//! interpreter or another model, is described by the same [`ToolSpec`]
//! object and invoked through [`execute`]. Catalog ordering is significant:
//! tool index `i` lines up with coordinate `i` of metric and preference
//! vectors.

mod catalog;
mod description;
mod executor;
mod http;
mod pricing;
mod spec;

pub use catalog::ToolCatalog;
pub use description::{
    build_model_description, DescriptionWriter, DomainTally, ModelDescription, TemplateWriter,
    DESCRIPTION_HEADER,
};
pub use executor::{execute, ExecContext, ToolCall, ToolResult};
pub use http::{ChatMessage, ChatRequest, ChatResponse, EndpointConfig, HttpModelClient, ModelClient, Usage};
pub use pricing::{price_call, Jitter, LatencyModel, PricingEntry, TokenCounter};
pub use spec::{ParamSpec, ParamType, ScriptedTool, ToolBinding, ToolKind, ToolSpec};
