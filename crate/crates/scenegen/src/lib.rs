//! Task generation: scene-graph templates, object sampling, pose
//! instantiation, and geometric validity with rejection sampling.

mod error;
pub mod files;
mod generate;
mod geometry;
mod graph;
mod sample;
mod validate;

pub use error::SceneGenError;
pub use generate::{
    generate_batch, generate_task, manifest_to_json, splitmix64, BatchEntry, GeneratedTask,
};
pub use geometry::{
    clip_polygon, convex_hull, footprint, footprint_overlap_ratio, penetration_depth, polygon_area,
    separation_distance, Obb,
};
pub use graph::{GraphEdge, Jitter, Relation, SceneGraph, SlotFilter, SlotNode, TaskTemplate};
pub use sample::{
    instantiate_poses, sample_objects, ADJACENT_GAP_MAX_CM, ADJACENT_MAX_DISTANCE_CM,
};
pub use validate::{
    validate_scene, GenerationConfig, Support, ValidationOutcome, Violation, Workspace,
    SUPPORT_OVERLAP_MIN,
};
