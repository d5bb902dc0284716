use thiserror::Error;

use crate::types::Stage;

/// Failure modes of the contest pipeline.
#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("unknown contest `{0}`")]
    UnknownContest(String),
    #[error("contest `{0}` already exists")]
    ContestExists(String),
    #[error("contest `{0}` is closed")]
    ContestClosed(String),
    #[error("payload does not match the task set: {0}")]
    TaskSetMismatch(String),
    #[error("payload is {bytes} bytes, over the {cap} byte cap")]
    PayloadTooLarge { bytes: u64, cap: u64 },
    #[error("invalid payload: {0}")]
    InvalidPayload(String),
    #[error("unknown submission `{0}`")]
    UnknownSubmission(String),
    #[error("invalid stage transition {from:?} -> {to:?}")]
    InvalidTransition { from: Stage, to: Stage },
    #[error("invalid contest config: {0}")]
    BadContestConfig(String),
    #[error("corrupt store: {0}")]
    CorruptStore(String),
    #[error(transparent)]
    Scoring(#[from] tablebench_scoring::ScoringError),
    #[error(transparent)]
    Harness(#[from] tablebench_harness::HarnessError),
    #[error(transparent)]
    Scene(#[from] tablebench_scenegen::SceneGenError),
    #[error(transparent)]
    Core(#[from] tablebench_core::CoreError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
