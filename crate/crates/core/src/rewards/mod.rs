//! Reward mathematics.
//!
//! Each trajectory is summarized by a metric vector `[tool counts.., outcome,
//! -cost, -latency]`. Training rewards min-max normalize these vectors over a
//! batch and dot them with the user's preference vector, gated on success.
//! Evaluation rewards compare against a baseline policy's vectors instead
//! (see [`eval`]).

pub mod eval;
mod judge;
mod metrics;
mod normalize;
mod preference;
mod report;

pub use eval::{eval_normalize, eval_reward, BaselineEntry, CENTS_PER_DOLLAR, preference_score, BaselineStore, EvalExample, EvalVector, PreferenceScore};
pub use judge::{normalize_answer, outcome_reward, Judge, NormalizedExactMatch, OutcomeVerdict};
pub use metrics::{metric_vector, RawMetricVector};
pub use normalize::{checked_final_reward, final_reward, normalize_batch, NormalizedBatch};
pub use preference::{preference_vector, validate_vector, PreferenceProfile};
pub use report::{score_batch, BatchReport, RewardBreakdown, RewardInput};
