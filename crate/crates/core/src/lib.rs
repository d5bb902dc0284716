//! Domain types, rigid-body geometry, and canonical file formats for the
//! tablebench rearrangement benchmark.
//!
//! Everything lives in a single table frame and all lengths are
//! centimeters. Types are immutable value objects after construction and
//! safe to share across threads.

pub mod error;
pub mod files;
pub mod geom;
pub mod model;
pub mod scene;

pub use error::CoreError;
pub use geom::{cube_vertices, Pose, Rotation, Vec3, ROTATION_TOL};
pub use model::{BoundingBox, ObjectDatabase, ObjectInstance, ObjectModel, SetTag};
pub use scene::{SceneConfiguration, Task, TaskObject};
