//! Scene configurations and tasks.

use std::collections::BTreeMap;

use crate::error::CoreError;
use crate::geom::Pose;
use crate::model::{BoundingBox, SetTag};

/// Mapping from instance id to pose; represents the initial, target, and
/// solution scenes alike.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SceneConfiguration {
    poses: BTreeMap<String, Pose>,
}

impl SceneConfiguration {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_poses(poses: BTreeMap<String, Pose>) -> Self {
        SceneConfiguration { poses }
    }

    pub fn set(&mut self, instance_id: impl Into<String>, pose: Pose) {
        self.poses.insert(instance_id.into(), pose);
    }

    pub fn get(&self, instance_id: &str) -> Option<&Pose> {
        self.poses.get(instance_id)
    }

    pub fn contains(&self, instance_id: &str) -> bool {
        self.poses.contains_key(instance_id)
    }

    /// Instance ids in sorted order.
    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.poses.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Pose)> {
        self.poses.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }
}

/// Object instance of a task together with its resolved model data.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskObject {
    pub instance_id: String,
    pub model_id: String,
    pub category: String,
    pub bbox: BoundingBox,
}

/// A rearrangement task: object set, initial scene, target scene.
#[derive(Debug, Clone, PartialEq)]
pub struct Task {
    pub task_id: String,
    pub set_tag: SetTag,
    pub objects: Vec<TaskObject>,
    pub initial: SceneConfiguration,
    pub target: SceneConfiguration,
}

impl Task {
    /// Validates that instance ids are unique and that both scenes cover
    /// exactly the task's object set.
    pub fn new(
        task_id: impl Into<String>,
        set_tag: SetTag,
        objects: Vec<TaskObject>,
        initial: SceneConfiguration,
        target: SceneConfiguration,
    ) -> Result<Self, CoreError> {
        if objects.is_empty() {
            return Err(CoreError::EmptyTask);
        }
        let mut seen = std::collections::BTreeSet::new();
        for o in &objects {
            if !seen.insert(o.instance_id.as_str()) {
                return Err(CoreError::DuplicateInstanceId(o.instance_id.clone()));
            }
        }
        for (scene, config) in [("initial", &initial), ("target", &target)] {
            for o in &objects {
                if !config.contains(&o.instance_id) {
                    return Err(CoreError::MissingInstance {
                        scene,
                        instance_id: o.instance_id.clone(),
                    });
                }
            }
            for id in config.ids() {
                if !seen.contains(id) {
                    return Err(CoreError::UnknownInstance {
                        scene,
                        instance_id: id.to_string(),
                    });
                }
            }
        }
        Ok(Task {
            task_id: task_id.into(),
            set_tag,
            objects,
            initial,
            target,
        })
    }

    pub fn object(&self, instance_id: &str) -> Option<&TaskObject> {
        self.objects.iter().find(|o| o.instance_id == instance_id)
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }
}
