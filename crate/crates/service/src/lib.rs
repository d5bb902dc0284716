//! Contest pipeline: submission ingest, deterministic evaluation, ranking,
//! and a persistent leaderboard served over HTTP.
//!
//! Every state change is appended to a per-contest JSONL log and synced
//! before it is acknowledged, so a crash never loses an accepted submission;
//! restart replays the log. Evaluation is deterministic, which makes retries
//! idempotent: re-scoring a submission produces byte-identical results.

mod engine;
mod error;
mod http;
mod store;
mod types;

pub use engine::ContestEngine;
pub use error::ServiceError;
pub use http::{router, serve, AppState, BIND_ENV, DATA_DIR_ENV};
pub use store::{ContestStore, Event};
pub use types::{
    ContestConfig, DisplayRule, ExecutionSettings, LeaderboardSnapshot, NoiseSettings, Payload,
    PrecomputedRun, ScriptRun, Selection, Stage, SubmissionRecord, SubmissionStatus, TaskSet,
    TaskSolution,
};
