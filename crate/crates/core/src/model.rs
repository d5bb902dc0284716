//! Object models and the object database.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::CoreError;

/// Object-model bounding-box dimensions in centimeters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub length: f64,
    pub width: f64,
    pub height: f64,
}

impl BoundingBox {
    pub fn new(length: f64, width: f64, height: f64) -> Result<Self, CoreError> {
        let ok = [length, width, height]
            .iter()
            .all(|d| d.is_finite() && *d > 0.0);
        if !ok {
            return Err(CoreError::InvalidBoundingBox {
                l: length,
                w: width,
                h: height,
            });
        }
        Ok(BoundingBox {
            length,
            width,
            height,
        })
    }

    /// `(L + W + H) / 3`, the edge length of the error cube.
    pub fn mean_dimension(&self) -> f64 {
        (self.length + self.width + self.height) / 3.0
    }
}

/// Whether a model or task belongs to the public trial split or the
/// held-out contest split.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetTag {
    Trial,
    Contest,
}

/// One entry of the object database.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectModel {
    pub model_id: String,
    pub category: String,
    pub bbox: BoundingBox,
    /// Opaque path to mesh data; carried through, never interpreted.
    pub mesh_ref: Option<String>,
    pub set_tag: SetTag,
}

/// One object slot of a task, referring to a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectInstance {
    pub instance_id: String,
    pub model_id: String,
}

/// Collection of object models with unique ids.
#[derive(Debug, Clone)]
pub struct ObjectDatabase {
    models: BTreeMap<String, ObjectModel>,
}

impl ObjectDatabase {
    pub fn new(models: Vec<ObjectModel>) -> Result<Self, CoreError> {
        let mut map = BTreeMap::new();
        for m in models {
            let id = m.model_id.clone();
            if map.insert(id.clone(), m).is_some() {
                return Err(CoreError::DuplicateModelId(id));
            }
        }
        Ok(ObjectDatabase { models: map })
    }

    pub fn get(&self, model_id: &str) -> Option<&ObjectModel> {
        self.models.get(model_id)
    }

    /// Models in deterministic (id-sorted) order.
    pub fn models(&self) -> impl Iterator<Item = &ObjectModel> {
        self.models.values()
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }
}
