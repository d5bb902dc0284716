use std::collections::BTreeMap;

use rand::RngExt;
use rand_chacha::ChaCha8Rng;
use tablebench_core::{ObjectDatabase, ObjectModel, Pose, Rotation, SceneConfiguration, Vec3};

use crate::error::SceneGenError;
use crate::geometry::Obb;
use crate::graph::{Relation, SceneGraph};
use crate::validate::Workspace;

/// Neighbors get a random extra gap of up to this many cm.
pub const ADJACENT_GAP_MAX_CM: f64 = 2.0;

/// Neighbors further apart than this fail validity, cm.
pub const ADJACENT_MAX_DISTANCE_CM: f64 = 5.0;

/// Uniform draw in `[-range, range]`; always consumes exactly one sample so
/// the stream layout does not depend on the range values.
fn symmetric(rng: &mut ChaCha8Rng, range: f64) -> f64 {
    (2.0 * rng.random::<f64>() - 1.0) * range
}

/// Binds every slot to a model drawn uniformly from its filtered candidates.
/// Slots are visited in sorted order, one draw per slot.
pub fn sample_objects(
    graph: &SceneGraph,
    db: &ObjectDatabase,
    rng: &mut ChaCha8Rng,
) -> Result<BTreeMap<String, ObjectModel>, SceneGenError> {
    let mut slots: Vec<&str> = graph.nodes.iter().map(|n| n.slot_id.as_str()).collect();
    slots.sort_unstable();
    let mut assignment = BTreeMap::new();
    for slot in slots {
        let node = graph.node(slot).expect("slot ids come from the graph");
        let candidates: Vec<&ObjectModel> =
            db.models().filter(|m| node.filter.matches(m)).collect();
        if candidates.is_empty() {
            return Err(SceneGenError::EmptyCandidateSet(slot.to_string()));
        }
        let pick = rng.random_range(0..candidates.len());
        assignment.insert(slot.to_string(), candidates[pick].clone());
    }
    Ok(assignment)
}

/// Bottom of the model's box when rotated, relative to the pose translation.
fn bottom_offset(model: &ObjectModel, rotation: Rotation) -> f64 {
    Obb::from_pose(&model.bbox, &Pose::new(rotation, Vec3::zeros())).min_z()
}

/// Places every slot, parents first.
///
/// Roots take their anchor pose plus jitter: a world-frame offset and a yaw
/// about the world z axis. Children start from parent ∘ offset ∘ jitter;
/// stacking then snaps the child's box bottom onto the parent's box top,
/// while adjacency keeps only the offset's horizontal direction, pushes the
/// child just past face contact plus a random gap, re-applies positional
/// jitter in the table frame, and grounds the child on the table surface.
///
/// Noise is drawn in instantiation order: per root x, y, z, yaw; per child
/// x, y, z, yaw, then a gap sample for adjacency edges.
pub fn instantiate_poses(
    graph: &SceneGraph,
    assignment: &BTreeMap<String, ObjectModel>,
    workspace: &Workspace,
    rng: &mut ChaCha8Rng,
) -> SceneConfiguration {
    let mut config = SceneConfiguration::new();
    for slot in graph.instantiation_order() {
        let node = graph.node(slot).expect("slot ids come from the graph");
        let model = &assignment[slot];
        let pose = match graph.parent_edge(slot) {
            None => {
                let jx = symmetric(rng, node.jitter.pos_range.x);
                let jy = symmetric(rng, node.jitter.pos_range.y);
                let jz = symmetric(rng, node.jitter.pos_range.z);
                let yaw = symmetric(rng, node.jitter.yaw_range_deg).to_radians();
                Pose::new(
                    Rotation::about_z(yaw).compose(&node.anchor.rotation),
                    node.anchor.translation + Vec3::new(jx, jy, jz),
                )
            }
            Some(edge) => {
                let parent_pose = *config
                    .get(&edge.parent_slot)
                    .expect("parents are placed first");
                let jx = symmetric(rng, edge.jitter.pos_range.x);
                let jy = symmetric(rng, edge.jitter.pos_range.y);
                let jz = symmetric(rng, edge.jitter.pos_range.z);
                let yaw = symmetric(rng, edge.jitter.yaw_range_deg).to_radians();
                let jitter_pose = Pose::new(Rotation::about_z(yaw), Vec3::new(jx, jy, jz));
                let base = parent_pose.compose(&edge.offset).compose(&jitter_pose);
                let parent_obb =
                    Obb::from_pose(&assignment[edge.parent_slot.as_str()].bbox, &parent_pose);
                match edge.relation {
                    Relation::OnTopOf => {
                        let z = parent_obb.max_z() - bottom_offset(model, base.rotation);
                        Pose::new(
                            base.rotation,
                            Vec3::new(base.translation.x, base.translation.y, z),
                        )
                    }
                    Relation::AdjacentTo => {
                        let gap = rng.random::<f64>() * ADJACENT_GAP_MAX_CM;
                        let dir = parent_pose.rotation.apply(edge.offset.translation);
                        let dir_xy = Vec3::new(dir.x, dir.y, 0.0);
                        let z = workspace.z0 - bottom_offset(model, base.rotation);
                        if dir_xy.norm() < 1e-9 {
                            // Degenerate direction: keep the chained position.
                            Pose::new(
                                base.rotation,
                                Vec3::new(base.translation.x, base.translation.y, z),
                            )
                        } else {
                            let d = dir_xy / dir_xy.norm();
                            let probe = Obb::from_pose(
                                &model.bbox,
                                &Pose::new(base.rotation, Vec3::zeros()),
                            );
                            let push = parent_obb.support(d) + probe.support(d) + gap;
                            let center_xy =
                                Vec3::new(parent_obb.center.x, parent_obb.center.y, 0.0)
                                    + d * push
                                    + Vec3::new(jx, jy, 0.0);
                            // probe.center is the rotated center offset from the
                            // pose translation, so subtracting it converts the
                            // desired box center back into a translation.
                            Pose::new(
                                base.rotation,
                                Vec3::new(
                                    center_xy.x - probe.center.x,
                                    center_xy.y - probe.center.y,
                                    z,
                                ),
                            )
                        }
                    }
                }
            }
        };
        config.set(slot, pose);
    }
    config
}
