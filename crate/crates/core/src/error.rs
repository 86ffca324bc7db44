use thiserror::Error;

/// Errors raised by the tool registry and executors.
#[derive(Debug, Error)]
pub enum ToolError {
    #[error("tool `{0}` is already registered")]
    DuplicateTool(String),
    #[error("tool `{tool}` has malformed parameters: {}", params.join(", "))]
    InvalidSchema { tool: String, params: Vec<String> },
    #[error("no tool named `{0}` is available")]
    UnknownTool(String),
    #[error("tool `{tool}`: argument `{param}` {reason}")]
    Argument {
        tool: String,
        param: String,
        reason: String,
    },
    #[error("unknown pricing reference `{0}`")]
    UnknownPricingRef(String),
    #[error("unknown latency reference `{0}`")]
    UnknownLatencyRef(String),
    #[error("invalid pricing entry: {0}")]
    InvalidPricing(String),
    #[error("tool `{0}` is not bound to an executor in this context")]
    Unbound(String),
    #[error("lists passed to the description builder differ in length ({tasks}, {trajectories}, {outcomes})")]
    DescriptionLengthMismatch {
        tasks: usize,
        trajectories: usize,
        outcomes: usize,
    },
    #[error("description builder needs at least one task")]
    EmptyDescriptionSample,
    #[error("model endpoint: {0}")]
    Endpoint(String),
}

/// Errors raised by simulated environments and bundles.
#[derive(Debug, Error)]
pub enum EnvError {
    #[error("episode already terminated")]
    Terminated,
    #[error("trajectory belongs to task `{found}`, expected `{expected}`")]
    TaskMismatch { expected: String, found: String },
    #[error("database validation failed: {}", .0.join("; "))]
    InvalidDb(Vec<String>),
    #[error("invalid task `{task}`: {reason}")]
    InvalidTask { task: String, reason: String },
    #[error("bundle: {0}")]
    Bundle(String),
    #[error(transparent)]
    Tool(#[from] ToolError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum RolloutError {
    #[error("invalid rollout config: {0}")]
    InvalidConfig(String),
    #[error("task lists tools missing from the catalog: {}", .0.join(", "))]
    UnavailableTools(Vec<String>),
    #[error("group size must be at least 2, got {0}")]
    GroupTooSmall(usize),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum RewardError {
    #[error("batch normalization needs at least 2 trajectories, got {0}")]
    BatchTooSmall(usize),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("trajectory tool counts have {found} entries but the catalog has {expected} tools")]
    CatalogMismatch { expected: usize, found: usize },
    #[error("invalid preference vector: {0}")]
    InvalidPreference(String),
    #[error("baseline misaligned: {0}")]
    Misaligned(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Error)]
pub enum GrpoError {
    #[error("group size must be at least 2, got {0}")]
    GroupTooSmall(usize),
    #[error("parallel inputs differ in length: {0}")]
    LengthMismatch(String),
    #[error("non-finite log-probability at index {0}")]
    NonFinite(usize),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("no training tasks supplied")]
    NoTasks,
    #[error(transparent)]
    Rollout(#[from] RolloutError),
    #[error(transparent)]
    Reward(#[from] RewardError),
}

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("template references unknown {kind} `{name}`")]
    UnresolvableReference { kind: &'static str, name: String },
    #[error("template/environment mismatch: {0}")]
    TemplateMismatch(String),
    #[error("table sizes must be positive (table `{0}`)")]
    InvalidSize(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Tool(#[from] ToolError),
    #[error(transparent)]
    Rollout(#[from] RolloutError),
}
