use thiserror::Error;

/// Errors raised while constructing or parsing domain values.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },
    #[error("rotation axis must be finite and nonzero")]
    DegenerateAxis,
    #[error("rotation matrix is not orthonormal (max deviation {max_deviation:.3e})")]
    NotOrthonormal { max_deviation: f64 },
    #[error("improper rotation, determinant {det:.6} (reflection, not a rotation)")]
    ImproperRotation { det: f64 },
    #[error("quaternion norm {norm} is further than 1e-6 from unit length")]
    NotUnitQuaternion { norm: f64 },
    #[error("bounding box dimensions must be positive, got {l} x {w} x {h}")]
    InvalidBoundingBox { l: f64, w: f64, h: f64 },
    #[error("duplicate model id `{0}`")]
    DuplicateModelId(String),
    #[error("duplicate instance id `{0}`")]
    DuplicateInstanceId(String),
    #[error("task must contain at least one object")]
    EmptyTask,
    #[error("{scene} configuration is missing a pose for instance `{instance_id}`")]
    MissingInstance {
        scene: &'static str,
        instance_id: String,
    },
    #[error("{scene} configuration has a pose for unknown instance `{instance_id}`")]
    UnknownInstance {
        scene: &'static str,
        instance_id: String,
    },
    #[error("unsupported schema version `{0}` (expected \"1\")")]
    UnsupportedSchemaVersion(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
