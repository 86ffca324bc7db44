//! Cost-, latency- and preference-aware tool orchestration.
//!
//! The crate is organized around the life of a training instance:
//!
//! - [`tool_registry`]: tool catalogs, pricing and latency models, executors.
//! - [`env_sim`]: simulated domain databases, episodes and the three-criterion verifier.
//! - [`rollout`]: the multi-turn reasoning/action/observation loop.
//! - [`rewards`]: outcome/compute/latency rewards, batch normalization, preference rewards.
//! - [`grpo`]: group advantages, training filters, the clipped objective and a toy policy.
//! - [`synth`]: template-driven environment, task and preference synthesis.
//! - [`analysis`]: aggregate reports computed from trajectory logs.

pub mod analysis;
pub mod env_sim;
pub mod error;
pub mod grpo;
pub mod rewards;
pub mod rollout;
pub mod seed;
pub mod synth;
pub mod tool_registry;

pub use env_sim::{DomainDb, EpisodeState, TaskSpec, VerificationReport};
pub use error::{EnvError, GrpoError, RewardError, RolloutError, SynthError, ToolError};
pub use rewards::{PreferenceProfile, RawMetricVector, RewardBreakdown};
pub use rollout::{Policy, PolicyDecision, RolloutConfig, Trajectory, Turn};
pub use tool_registry::{PricingEntry, ToolCall, ToolCatalog, ToolResult, ToolSpec};
