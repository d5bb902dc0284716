use std::collections::{BTreeMap, BTreeSet};

use tablebench_core::{ObjectModel, Pose, Vec3};

use crate::error::SceneGenError;

/// Uniform placement noise: offsets up to `pos_range` per axis, yaw up to
/// `yaw_range_deg` either way. Zero ranges mean an exact placement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jitter {
    pub pos_range: Vec3,
    pub yaw_range_deg: f64,
}

impl Jitter {
    pub fn none() -> Self {
        Jitter {
            pos_range: Vec3::zeros(),
            yaw_range_deg: 0.0,
        }
    }

    fn validate(&self, slot: &str) -> Result<(), SceneGenError> {
        let ok = self.pos_range.iter().all(|v| v.is_finite() && *v >= 0.0)
            && self.yaw_range_deg.is_finite()
            && self.yaw_range_deg >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(SceneGenError::InvalidTemplate(format!(
                "jitter ranges for '{slot}' must be finite and non-negative"
            )))
        }
    }
}

/// Which database models a slot may be filled with.
#[derive(Debug, Clone, PartialEq)]
pub enum SlotFilter {
    Categories(BTreeSet<String>),
    ModelIds(BTreeSet<String>),
}

impl SlotFilter {
    pub fn matches(&self, model: &ObjectModel) -> bool {
        match self {
            SlotFilter::Categories(cats) => cats.contains(&model.category),
            SlotFilter::ModelIds(ids) => ids.contains(&model.model_id),
        }
    }
}

/// One object slot; `jitter` applies when the slot is a root of its scene.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotNode {
    pub slot_id: String,
    pub filter: SlotFilter,
    pub anchor: Pose,
    pub jitter: Jitter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    OnTopOf,
    AdjacentTo,
}

/// Parent-child placement constraint.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphEdge {
    pub parent_slot: String,
    pub child_slot: String,
    pub relation: Relation,
    pub offset: Pose,
    pub jitter: Jitter,
}

/// Template of slots and relations from which one scene is instantiated.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneGraph {
    pub nodes: Vec<SlotNode>,
    pub edges: Vec<GraphEdge>,
}

impl SceneGraph {
    /// Checks the slot/edge structure: unique slots, known endpoints, at most
    /// one parent per node, no cycles, and sane jitter and adjacency offsets.
    pub fn validate(&self) -> Result<(), SceneGenError> {
        if self.nodes.is_empty() {
            return Err(SceneGenError::InvalidTemplate(
                "a scene graph needs at least one slot".to_string(),
            ));
        }
        let mut ids = BTreeSet::new();
        for node in &self.nodes {
            if !ids.insert(node.slot_id.as_str()) {
                return Err(SceneGenError::InvalidTemplate(format!(
                    "duplicate slot '{}'",
                    node.slot_id
                )));
            }
            node.jitter.validate(&node.slot_id)?;
            match &node.filter {
                SlotFilter::Categories(s) if s.is_empty() => {
                    return Err(SceneGenError::InvalidTemplate(format!(
                        "slot '{}' has an empty category filter",
                        node.slot_id
                    )))
                }
                SlotFilter::ModelIds(s) if s.is_empty() => {
                    return Err(SceneGenError::InvalidTemplate(format!(
                        "slot '{}' has an empty model filter",
                        node.slot_id
                    )))
                }
                _ => {}
            }
        }
        let mut parent_of: BTreeMap<&str, &str> = BTreeMap::new();
        for edge in &self.edges {
            for endpoint in [&edge.parent_slot, &edge.child_slot] {
                if !ids.contains(endpoint.as_str()) {
                    return Err(SceneGenError::InvalidTemplate(format!(
                        "edge references unknown slot '{endpoint}'"
                    )));
                }
            }
            if edge.parent_slot == edge.child_slot {
                return Err(SceneGenError::InvalidTemplate(format!(
                    "slot '{}' cannot relate to itself",
                    edge.child_slot
                )));
            }
            if parent_of
                .insert(edge.child_slot.as_str(), edge.parent_slot.as_str())
                .is_some()
            {
                return Err(SceneGenError::InvalidTemplate(format!(
                    "slot '{}' has more than one parent",
                    edge.child_slot
                )));
            }
            edge.jitter.validate(&edge.child_slot)?;
            if edge.relation == Relation::AdjacentTo {
                let xy = Vec3::new(edge.offset.translation.x, edge.offset.translation.y, 0.0);
                if xy.norm() < 1e-9 {
                    return Err(SceneGenError::InvalidTemplate(format!(
                        "adjacency edge to '{}' needs a horizontal offset direction",
                        edge.child_slot
                    )));
                }
            }
        }
        // Following parent links must terminate; a loop means a cycle.
        for node in &self.nodes {
            let mut cursor = node.slot_id.as_str();
            let mut steps = 0;
            while let Some(parent) = parent_of.get(cursor) {
                cursor = parent;
                steps += 1;
                if steps > self.nodes.len() {
                    return Err(SceneGenError::InvalidTemplate(format!(
                        "relation cycle through slot '{}'",
                        node.slot_id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn node(&self, slot_id: &str) -> Option<&SlotNode> {
        self.nodes.iter().find(|n| n.slot_id == slot_id)
    }

    /// Edge whose child is `slot_id`, if the slot has a parent.
    pub fn parent_edge(&self, slot_id: &str) -> Option<&GraphEdge> {
        self.edges.iter().find(|e| e.child_slot == slot_id)
    }

    /// Deterministic parents-first order: roots in slot order, then each
    /// placed node's children in slot order. Placement noise is drawn in
    /// exactly this order, so the order is part of the file-format contract.
    pub fn instantiation_order(&self) -> Vec<&str> {
        let children_of = |slot: &str| {
            let mut kids: Vec<&str> = self
                .edges
                .iter()
                .filter(|e| e.parent_slot == slot)
                .map(|e| e.child_slot.as_str())
                .collect();
            kids.sort_unstable();
            kids
        };
        let mut order: Vec<&str> = self
            .nodes
            .iter()
            .map(|n| n.slot_id.as_str())
            .filter(|id| self.parent_edge(id).is_none())
            .collect();
        order.sort_unstable();
        let mut i = 0;
        while i < order.len() {
            let slot = order[i];
            order.extend(children_of(slot));
            i += 1;
        }
        order
    }

    fn slot_ids(&self) -> BTreeSet<&str> {
        self.nodes.iter().map(|n| n.slot_id.as_str()).collect()
    }
}

/// Paired initial/target graphs over one shared slot set.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskTemplate {
    pub template_id: String,
    pub initial: SceneGraph,
    pub target: SceneGraph,
}

impl TaskTemplate {
    /// Validates both graphs and requires identical slots and filters, since
    /// one object assignment is shared by the initial and target scenes.
    pub fn validate(&self) -> Result<(), SceneGenError> {
        if self.template_id.is_empty() {
            return Err(SceneGenError::InvalidTemplate(
                "template_id must not be empty".to_string(),
            ));
        }
        self.initial.validate()?;
        self.target.validate()?;
        if self.initial.slot_ids() != self.target.slot_ids() {
            return Err(SceneGenError::InvalidTemplate(format!(
                "template '{}': initial and target slots differ",
                self.template_id
            )));
        }
        for node in &self.initial.nodes {
            let twin = self.target.node(&node.slot_id).expect("slot sets match");
            if twin.filter != node.filter {
                return Err(SceneGenError::InvalidTemplate(format!(
                    "template '{}': slot '{}' has different filters in the two scenes",
                    self.template_id, node.slot_id
                )));
            }
        }
        Ok(())
    }
}
