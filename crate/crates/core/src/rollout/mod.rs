//! The multi-turn reasoning/action/observation loop.
//!
//! [`run_episode`] alternates between asking a [`Policy`] for its next step
//! and executing the chosen call against a private [`EpisodeState`]
//! until the policy answers, the environment signals the end, the policy
//! output cannot be parsed, or the turn cap is reached.
//!
//! [`EpisodeState`]: crate::env_sim::EpisodeState

mod log;
mod policy;
mod runner;
mod trajectory;

pub use log::{read_trajectories, write_trajectories};
pub use policy::{
    parse_response, AnswerImmediately, EndpointPolicy, GoldenReplay, Message, NeverAnswer, Policy, PolicyDecision,
    PolicyInput, Scripted, TextPolicy,
};
pub use runner::{run_episode, run_episode_with, run_group, system_prompt, RolloutConfig, DEFAULT_MAX_TURNS};
pub use trajectory::{Totals, Trajectory, Turn};
