//! Simulated domain environments.
//!
//! A [`DomainDb`] holds typed, cross-referenced records. Domain tools are
//! [`DomainOp`]s executed transactionally against an [`EpisodeState`] forked
//! from a task's initial database. [`verify`] decides whether a trajectory
//! solved a [`TaskSpec`] by three checks: the final database matches the
//! golden replay, the required information was communicated, and every entry
//! the golden calls touched was also touched by the trajectory.

mod bundle;
mod db;
mod episode;
mod ops;
mod task;
mod verify;

pub use bundle::{write_json, write_jsonl, EntryLine, EnvBundle, PreferenceLine, Split, TaskLine};
pub use db::{normalize_text, values_equal, DiffEntry, DomainDb, FieldDef, FieldType, Record, TableSchema, FLOAT_TOLERANCE};
pub use episode::{EpisodeState, TerminationReason};
pub use ops::{DomainOp, Guard, ValueSource};
pub use task::TaskSpec;
pub use verify::{verify, verify_with, InfoMatcher, NormalizedSubstring, VerificationReport};
