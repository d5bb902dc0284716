use thiserror::Error;

/// Failure modes of script parsing and execution.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// The script violates the pick/place protocol.
    #[error("malformed script: {0}")]
    MalformedScript(String),
    /// An action names an instance that does not exist in the task.
    #[error("unknown instance `{0}`")]
    UnknownInstance(String),
    /// The execution configuration is unusable.
    #[error("bad execution config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Core(#[from] tablebench_core::CoreError),
    #[error(transparent)]
    Scene(#[from] tablebench_scenegen::SceneGenError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
