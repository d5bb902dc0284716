use thiserror::Error;

/// Errors raised while loading templates or generating tasks.
#[derive(Debug, Error)]
pub enum SceneGenError {
    #[error("invalid template: {0}")]
    InvalidTemplate(String),
    #[error("no model in the database matches slot '{0}'")]
    EmptyCandidateSet(String),
    #[error("gave up on template '{template_id}' after {attempts} rejected attempts")]
    GenerationExhausted { template_id: String, attempts: u32 },
    #[error("configuration has no pose for instance '{0}'")]
    MissingPose(String),
    #[error("workspace extents must be positive and finite")]
    BadWorkspace,
    #[error("max_rejections must be at least 1")]
    BadRejectionLimit,
    #[error("trial fraction {0} is outside [0, 1]")]
    BadTrialFraction(f64),
    #[error(transparent)]
    Core(#[from] tablebench_core::CoreError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
