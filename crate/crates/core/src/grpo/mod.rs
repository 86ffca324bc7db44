//! Group-relative policy optimization at toy scale.
//!
//! Rewards are standardized within each group of rollouts of the same task
//! ([`group_advantages`]), groups and trajectories that carry no usable
//! signal are filtered out first ([`apply_filters`]), and a linear softmax
//! [`ToyPolicy`] is updated by gradient ascent on the clipped surrogate
//! ([`clipped_objective`]).

mod advantages;
pub mod bandit;
mod filters;
mod gradcheck;
mod objective;
mod toy_policy;
mod trainer;

pub use advantages::{group_advantages, mean, population_std, GroupAdvantages, DEGENERATE_STD};
pub use filters::{
    apply_filters, apply_filters_to, is_homogeneous, trajectory_filters, FilterDecision, FilterReason, STD_THRESHOLD,
    THRESHOLD_REL_TOLERANCE,
};
pub use gradcheck::{gradient_check, random_fixture, GradCheck, FD_STEP, REL_ERROR_FLOOR};
pub use objective::{clipped_objective, term_gradients, ObjectiveValue, RatioStats, TermDiagnostics, EPSILON};
pub use toy_policy::{fill_arguments, DecisionPoint, ToyPolicy, DOMAIN_BUCKETS};
pub use trainer::{
    default_preference, objective_and_grad, score_group, train_toy_policy, Sample, ScoredGroup, StepMetrics,
    TrainConfig, UpdateReport,
};
