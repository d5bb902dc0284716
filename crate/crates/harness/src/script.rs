//! Pick-and-place action scripts and their on-disk form.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tablebench_core::files::PoseDto;
use tablebench_core::{Pose, Task};

use crate::error::HarnessError;

/// One step of a rearrangement script.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    /// Grasp the named instance, lifting it out of the scene.
    Pick { id: String },
    /// Release the held instance at the given world pose.
    Place { id: String, pose: Pose },
}

impl Action {
    /// Instance the action operates on.
    pub fn instance_id(&self) -> &str {
        match self {
            Action::Pick { id } | Action::Place { id, .. } => id,
        }
    }

    /// Short operation name, `"pick"` or `"place"`.
    pub fn op(&self) -> &'static str {
        match self {
            Action::Pick { .. } => "pick",
            Action::Place { .. } => "place",
        }
    }
}

/// An ordered list of actions submitted for one task.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ActionScript {
    pub actions: Vec<Action>,
}

impl ActionScript {
    pub fn new(actions: Vec<Action>) -> Self {
        Self { actions }
    }

    /// Checks the script against the single-gripper protocol for `task`.
    ///
    /// Every action must name an instance of the task, a pick may not be
    /// issued while another pick is outstanding, and every place must name
    /// the instance picked immediately before it. A trailing pick with no
    /// matching place is legal; execution returns such an object to the pose
    /// it was lifted from.
    pub fn validate(&self, task: &Task) -> Result<(), HarnessError> {
        let known: BTreeSet<&str> = task
            .objects
            .iter()
            .map(|o| o.instance_id.as_str())
            .collect();
        let mut holding: Option<&str> = None;
        for (index, action) in self.actions.iter().enumerate() {
            let id = action.instance_id();
            if !known.contains(id) {
                return Err(HarnessError::UnknownInstance(id.to_string()));
            }
            match action {
                Action::Pick { .. } => {
                    if let Some(other) = holding {
                        return Err(HarnessError::MalformedScript(format!(
                            "action {index} picks `{id}` while `{other}` is already held"
                        )));
                    }
                    holding = Some(id);
                }
                Action::Place { .. } => match holding {
                    Some(other) if other == id => holding = None,
                    Some(other) => {
                        return Err(HarnessError::MalformedScript(format!(
                            "action {index} places `{id}` while holding `{other}`"
                        )));
                    }
                    None => {
                        return Err(HarnessError::MalformedScript(format!(
                            "action {index} places `{id}` without a preceding pick"
                        )));
                    }
                },
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase", deny_unknown_fields)]
enum ActionDto {
    Pick {
        id: String,
    },
    Place {
        id: String,
        position: [f64; 3],
        orientation_xyzw: [f64; 4],
    },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptDto {
    actions: Vec<ActionDto>,
}

fn script_to_dto(script: &ActionScript) -> ScriptDto {
    ScriptDto {
        actions: script
            .actions
            .iter()
            .map(|action| match action {
                Action::Pick { id } => ActionDto::Pick { id: id.clone() },
                Action::Place { id, pose } => {
                    let pose_dto = PoseDto::from_pose(pose);
                    ActionDto::Place {
                        id: id.clone(),
                        position: pose_dto.position,
                        orientation_xyzw: pose_dto.orientation_xyzw,
                    }
                }
            })
            .collect(),
    }
}

fn script_from_dto(dto: ScriptDto) -> Result<ActionScript, HarnessError> {
    let mut actions = Vec::with_capacity(dto.actions.len());
    for entry in dto.actions {
        actions.push(match entry {
            ActionDto::Pick { id } => Action::Pick { id },
            ActionDto::Place {
                id,
                position,
                orientation_xyzw,
            } => {
                let pose_dto = PoseDto {
                    position,
                    orientation_xyzw,
                };
                Action::Place {
                    id,
                    pose: pose_dto.to_pose()?,
                }
            }
        });
    }
    Ok(ActionScript::new(actions))
}

impl Serialize for ActionScript {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        script_to_dto(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ActionScript {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        script_from_dto(ScriptDto::deserialize(deserializer)?).map_err(serde::de::Error::custom)
    }
}

/// Serializes a script to pretty-printed JSON with a trailing newline.
pub fn script_to_json(script: &ActionScript) -> Result<String, HarnessError> {
    Ok(format!(
        "{}\n",
        serde_json::to_string_pretty(&script_to_dto(script))?
    ))
}

/// Parses a script from JSON. Protocol checks happen later, at execution.
pub fn script_from_json(text: &str) -> Result<ActionScript, HarnessError> {
    script_from_dto(serde_json::from_str(text)?)
}

pub fn read_script(path: &Path) -> Result<ActionScript, HarnessError> {
    script_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_script(path: &Path, script: &ActionScript) -> Result<(), HarnessError> {
    Ok(std::fs::write(path, script_to_json(script)?)?)
}
