//! Canonical JSON file formats.
//!
//! Numbers are serialized with the shortest round-trip representation
//! (serde_json default) and maps use sorted keys, so identical inputs
//! always produce identical bytes.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::geom::{Pose, Rotation, Vec3};
use crate::model::{BoundingBox, ObjectDatabase, ObjectModel, SetTag};
use crate::scene::{SceneConfiguration, Task, TaskObject};

pub const TASK_SCHEMA_VERSION: &str = "1";

/// Pose as stored in files: position plus unit quaternion `[x, y, z, w]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoseDto {
    pub position: [f64; 3],
    pub orientation_xyzw: [f64; 4],
}

impl PoseDto {
    pub fn from_pose(pose: &Pose) -> Self {
        PoseDto {
            position: [pose.translation.x, pose.translation.y, pose.translation.z],
            orientation_xyzw: pose.rotation.to_quaternion_xyzw(),
        }
    }

    pub fn to_pose(&self) -> Result<Pose, CoreError> {
        let [x, y, z] = self.position;
        if ![x, y, z].iter().all(|v| v.is_finite()) {
            return Err(CoreError::NonFinite {
                context: "position",
            });
        }
        let [qx, qy, qz, qw] = self.orientation_xyzw;
        Ok(Pose::new(
            Rotation::from_quaternion_xyzw(qx, qy, qz, qw)?,
            Vec3::new(x, y, z),
        ))
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BBoxDto {
    pub l: f64,
    pub w: f64,
    pub h: f64,
}

impl BBoxDto {
    pub fn from_bbox(b: &BoundingBox) -> Self {
        BBoxDto {
            l: b.length,
            w: b.width,
            h: b.height,
        }
    }

    pub fn to_bbox(&self) -> Result<BoundingBox, CoreError> {
        BoundingBox::new(self.l, self.w, self.h)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TaskObjectDto {
    instance_id: String,
    model_id: String,
    bbox: BBoxDto,
    category: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TaskFile {
    schema_version: String,
    task_id: String,
    set_tag: SetTag,
    objects: Vec<TaskObjectDto>,
    initial: BTreeMap<String, PoseDto>,
    target: BTreeMap<String, PoseDto>,
}

/// Scene configuration as a plain map of pose DTOs, the form used in files.
pub fn scene_config_to_dto(config: &SceneConfiguration) -> BTreeMap<String, PoseDto> {
    config
        .iter()
        .map(|(id, pose)| (id.to_string(), PoseDto::from_pose(pose)))
        .collect()
}

pub fn scene_config_from_dto(
    dto: &BTreeMap<String, PoseDto>,
) -> Result<SceneConfiguration, CoreError> {
    let mut config = SceneConfiguration::new();
    for (id, pose) in dto {
        config.set(id.clone(), pose.to_pose()?);
    }
    Ok(config)
}

pub fn task_to_json(task: &Task) -> String {
    let file = TaskFile {
        schema_version: TASK_SCHEMA_VERSION.to_string(),
        task_id: task.task_id.clone(),
        set_tag: task.set_tag,
        objects: task
            .objects
            .iter()
            .map(|o| TaskObjectDto {
                instance_id: o.instance_id.clone(),
                model_id: o.model_id.clone(),
                bbox: BBoxDto::from_bbox(&o.bbox),
                category: o.category.clone(),
            })
            .collect(),
        initial: scene_config_to_dto(&task.initial),
        target: scene_config_to_dto(&task.target),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("task serialization");
    s.push('\n');
    s
}

pub fn task_from_json(json: &str) -> Result<Task, CoreError> {
    let file: TaskFile = serde_json::from_str(json)?;
    if file.schema_version != TASK_SCHEMA_VERSION {
        return Err(CoreError::UnsupportedSchemaVersion(file.schema_version));
    }
    let objects = file
        .objects
        .iter()
        .map(|o| {
            Ok(TaskObject {
                instance_id: o.instance_id.clone(),
                model_id: o.model_id.clone(),
                category: o.category.clone(),
                bbox: o.bbox.to_bbox()?,
            })
        })
        .collect::<Result<Vec<_>, CoreError>>()?;
    Task::new(
        file.task_id,
        file.set_tag,
        objects,
        scene_config_from_dto(&file.initial)?,
        scene_config_from_dto(&file.target)?,
    )
}

pub fn read_task(path: impl AsRef<Path>) -> Result<Task, CoreError> {
    task_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_task(path: impl AsRef<Path>, task: &Task) -> Result<(), CoreError> {
    std::fs::write(path, task_to_json(task))?;
    Ok(())
}

/// Bare scene configuration file: `{instance_id: {position, orientation_xyzw}}`.
pub fn scene_config_to_json(config: &SceneConfiguration) -> String {
    let mut s =
        serde_json::to_string_pretty(&scene_config_to_dto(config)).expect("config serialization");
    s.push('\n');
    s
}

pub fn scene_config_from_json(json: &str) -> Result<SceneConfiguration, CoreError> {
    let dto: BTreeMap<String, PoseDto> = serde_json::from_str(json)?;
    scene_config_from_dto(&dto)
}

pub fn read_scene_config(path: impl AsRef<Path>) -> Result<SceneConfiguration, CoreError> {
    scene_config_from_json(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ObjectModelDto {
    model_id: String,
    category: String,
    bbox: BBoxDto,
    set_tag: SetTag,
    #[serde(skip_serializing_if = "Option::is_none")]
    mesh_ref: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ObjectDatabaseFile {
    models: Vec<ObjectModelDto>,
}

pub fn database_to_json(db: &ObjectDatabase) -> String {
    let file = ObjectDatabaseFile {
        models: db
            .models()
            .map(|m| ObjectModelDto {
                model_id: m.model_id.clone(),
                category: m.category.clone(),
                bbox: BBoxDto::from_bbox(&m.bbox),
                set_tag: m.set_tag,
                mesh_ref: m.mesh_ref.clone(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("database serialization");
    s.push('\n');
    s
}

pub fn database_from_json(json: &str) -> Result<ObjectDatabase, CoreError> {
    let file: ObjectDatabaseFile = serde_json::from_str(json)?;
    let models = file
        .models
        .iter()
        .map(|m| {
            Ok(ObjectModel {
                model_id: m.model_id.clone(),
                category: m.category.clone(),
                bbox: m.bbox.to_bbox()?,
                mesh_ref: m.mesh_ref.clone(),
                set_tag: m.set_tag,
            })
        })
        .collect::<Result<Vec<_>, CoreError>>()?;
    ObjectDatabase::new(models)
}

pub fn read_database(path: impl AsRef<Path>) -> Result<ObjectDatabase, CoreError> {
    database_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_database(path: impl AsRef<Path>, db: &ObjectDatabase) -> Result<(), CoreError> {
    std::fs::write(path, database_to_json(db))?;
    Ok(())
}
