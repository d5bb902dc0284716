use thiserror::Error;

/// Errors raised while scoring, aggregating, or exporting results.
#[derive(Debug, Error)]
pub enum ScoringError {
    #[error("upper error bound constant must be positive, got {0}")]
    NonPositiveConstant(f64),
    #[error("solution has no pose for instance '{0}'")]
    MissingObject(String),
    #[error("baseline must be positive, got {0}")]
    NonPositiveBaseline(f64),
    #[error("expected at least one run")]
    EmptyInput,
    #[error("grasp successes {successes} exceed attempts {attempts}")]
    InvalidCounts { successes: u64, attempts: u64 },
    #[error("a run must score at least one task")]
    EmptyRun,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("csv export failed: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
