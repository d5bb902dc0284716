use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tablebench_core::files::PoseDto;
use tablebench_core::Vec3;

use crate::error::SceneGenError;
use crate::graph::{GraphEdge, Jitter, Relation, SceneGraph, SlotFilter, SlotNode, TaskTemplate};
use crate::validate::Workspace;

/// Workspace bounds as stored in config files, cm.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WorkspaceDto {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub z0: f64,
    pub z_max: f64,
}

impl WorkspaceDto {
    pub fn from_workspace(ws: &Workspace) -> Self {
        WorkspaceDto {
            x_min: ws.x_min,
            x_max: ws.x_max,
            y_min: ws.y_min,
            y_max: ws.y_max,
            z0: ws.z0,
            z_max: ws.z_max,
        }
    }

    pub fn to_workspace(&self) -> Result<Workspace, SceneGenError> {
        Workspace::new(
            self.x_min, self.x_max, self.y_min, self.y_max, self.z0, self.z_max,
        )
    }
}

#[derive(Serialize, Deserialize)]
struct JitterDto {
    pos_range: [f64; 3],
    yaw_range_deg: f64,
}

impl JitterDto {
    fn from_jitter(j: &Jitter) -> Self {
        JitterDto {
            pos_range: [j.pos_range.x, j.pos_range.y, j.pos_range.z],
            yaw_range_deg: j.yaw_range_deg,
        }
    }

    fn to_jitter(&self) -> Jitter {
        Jitter {
            pos_range: Vec3::new(self.pos_range[0], self.pos_range[1], self.pos_range[2]),
            yaw_range_deg: self.yaw_range_deg,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct SlotNodeDto {
    slot_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    categories: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model_ids: Option<Vec<String>>,
    anchor: PoseDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    jitter: Option<JitterDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RelationDto {
    OnTopOf,
    AdjacentTo,
}

#[derive(Serialize, Deserialize)]
struct GraphEdgeDto {
    parent_slot: String,
    child_slot: String,
    relation: RelationDto,
    offset: PoseDto,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    jitter: Option<JitterDto>,
}

#[derive(Serialize, Deserialize)]
struct SceneGraphDto {
    nodes: Vec<SlotNodeDto>,
    edges: Vec<GraphEdgeDto>,
}

#[derive(Serialize, Deserialize)]
struct TaskTemplateDto {
    template_id: String,
    initial: SceneGraphDto,
    target: SceneGraphDto,
}

fn graph_to_dto(graph: &SceneGraph) -> SceneGraphDto {
    SceneGraphDto {
        nodes: graph
            .nodes
            .iter()
            .map(|n| {
                let (categories, model_ids) = match &n.filter {
                    SlotFilter::Categories(c) => (Some(c.iter().cloned().collect()), None),
                    SlotFilter::ModelIds(m) => (None, Some(m.iter().cloned().collect())),
                };
                SlotNodeDto {
                    slot_id: n.slot_id.clone(),
                    categories,
                    model_ids,
                    anchor: PoseDto::from_pose(&n.anchor),
                    jitter: Some(JitterDto::from_jitter(&n.jitter)),
                }
            })
            .collect(),
        edges: graph
            .edges
            .iter()
            .map(|e| GraphEdgeDto {
                parent_slot: e.parent_slot.clone(),
                child_slot: e.child_slot.clone(),
                relation: match e.relation {
                    Relation::OnTopOf => RelationDto::OnTopOf,
                    Relation::AdjacentTo => RelationDto::AdjacentTo,
                },
                offset: PoseDto::from_pose(&e.offset),
                jitter: Some(JitterDto::from_jitter(&e.jitter)),
            })
            .collect(),
    }
}

fn graph_from_dto(dto: SceneGraphDto) -> Result<SceneGraph, SceneGenError> {
    let nodes = dto
        .nodes
        .into_iter()
        .map(|n| {
            let filter = match (n.categories, n.model_ids) {
                (Some(c), None) => SlotFilter::Categories(BTreeSet::from_iter(c)),
                (None, Some(m)) => SlotFilter::ModelIds(BTreeSet::from_iter(m)),
                _ => {
                    return Err(SceneGenError::InvalidTemplate(format!(
                        "slot '{}' needs exactly one of 'categories' or 'model_ids'",
                        n.slot_id
                    )))
                }
            };
            Ok(SlotNode {
                slot_id: n.slot_id,
                filter,
                anchor: n.anchor.to_pose()?,
                jitter: n.jitter.map(|j| j.to_jitter()).unwrap_or_else(Jitter::none),
            })
        })
        .collect::<Result<Vec<_>, SceneGenError>>()?;
    let edges = dto
        .edges
        .into_iter()
        .map(|e| {
            Ok(GraphEdge {
                parent_slot: e.parent_slot,
                child_slot: e.child_slot,
                relation: match e.relation {
                    RelationDto::OnTopOf => Relation::OnTopOf,
                    RelationDto::AdjacentTo => Relation::AdjacentTo,
                },
                offset: e.offset.to_pose()?,
                jitter: e.jitter.map(|j| j.to_jitter()).unwrap_or_else(Jitter::none),
            })
        })
        .collect::<Result<Vec<_>, SceneGenError>>()?;
    Ok(SceneGraph { nodes, edges })
}

/// Serializes a template; output is stable for a given template.
pub fn template_to_json(template: &TaskTemplate) -> String {
    let dto = TaskTemplateDto {
        template_id: template.template_id.clone(),
        initial: graph_to_dto(&template.initial),
        target: graph_to_dto(&template.target),
    };
    let mut text = serde_json::to_string_pretty(&dto).expect("template serializes");
    text.push('\n');
    text
}

/// Parses and fully validates a template.
pub fn template_from_json(text: &str) -> Result<TaskTemplate, SceneGenError> {
    let dto: TaskTemplateDto = serde_json::from_str(text)?;
    let template = TaskTemplate {
        template_id: dto.template_id,
        initial: graph_from_dto(dto.initial)?,
        target: graph_from_dto(dto.target)?,
    };
    template.validate()?;
    Ok(template)
}

pub fn read_template(path: impl AsRef<Path>) -> Result<TaskTemplate, SceneGenError> {
    template_from_json(&fs::read_to_string(path)?)
}

pub fn write_template(
    path: impl AsRef<Path>,
    template: &TaskTemplate,
) -> Result<(), SceneGenError> {
    Ok(fs::write(path, template_to_json(template))?)
}
