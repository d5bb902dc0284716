use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use tablebench_core::{ObjectDatabase, SceneConfiguration, SetTag, Task, TaskObject};

use crate::error::SceneGenError;
use crate::geometry::{separation_distance, Obb};
use crate::graph::{Relation, SceneGraph, TaskTemplate};
use crate::sample::{instantiate_poses, sample_objects, ADJACENT_MAX_DISTANCE_CM};
use crate::validate::{validate_scene, GenerationConfig, Support, Violation, Workspace};

/// One seed-mixing step (splitmix64 finalizer); task k of a batch uses
/// `splitmix64(master_seed ^ k)` so tasks draw from independent streams.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A generated task plus the bookkeeping that makes it reproducible.
#[derive(Debug, Clone)]
pub struct GeneratedTask {
    pub task: Task,
    pub template_id: String,
    pub seed: u64,
    pub rejections_used: u32,
}

/// One template's share of a batch.
#[derive(Debug, Clone)]
pub struct BatchEntry {
    pub template: TaskTemplate,
    pub count: usize,
}

/// Violations of the template's relation edges, checked on top of plain
/// scene validity: stacked children must rest on their own parent, and
/// adjacent children must stay within face-contact distance.
fn relation_violations(
    graph: &SceneGraph,
    config: &SceneConfiguration,
    objects: &[TaskObject],
    supporters: &std::collections::BTreeMap<String, Support>,
) -> Vec<Violation> {
    let obb_of = |id: &str| {
        let obj = objects
            .iter()
            .find(|o| o.instance_id == id)
            .expect("edges reference known slots");
        Obb::from_pose(&obj.bbox, config.get(id).expect("config covers all slots"))
    };
    let mut violations = Vec::new();
    for edge in &graph.edges {
        match edge.relation {
            Relation::OnTopOf => {
                let expected = Support::OnInstance(edge.parent_slot.clone());
                if supporters.get(&edge.child_slot) != Some(&expected) {
                    violations.push(Violation::WrongSupporter {
                        child: edge.child_slot.clone(),
                        expected_parent: edge.parent_slot.clone(),
                    });
                }
            }
            Relation::AdjacentTo => {
                let distance =
                    separation_distance(&obb_of(&edge.parent_slot), &obb_of(&edge.child_slot));
                if distance > ADJACENT_MAX_DISTANCE_CM {
                    violations.push(Violation::AdjacencyTooFar {
                        parent: edge.parent_slot.clone(),
                        child: edge.child_slot.clone(),
                        distance_cm: distance,
                    });
                }
            }
        }
    }
    violations
}

/// Rejection-samples one task from a template until both scenes are valid.
///
/// The whole attempt sequence consumes a single random stream seeded from
/// `cfg.seed`, so a given (template, database, config) triple always yields
/// the same task.
pub fn generate_task(
    task_id: &str,
    set_tag: SetTag,
    template: &TaskTemplate,
    db: &ObjectDatabase,
    workspace: &Workspace,
    cfg: &GenerationConfig,
) -> Result<GeneratedTask, SceneGenError> {
    template.validate()?;
    if cfg.max_rejections < 1 {
        return Err(SceneGenError::BadRejectionLimit);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for attempt in 0..cfg.max_rejections {
        let assignment = sample_objects(&template.initial, db, &mut rng)?;
        let initial = instantiate_poses(&template.initial, &assignment, workspace, &mut rng);
        let target = instantiate_poses(&template.target, &assignment, workspace, &mut rng);
        let objects: Vec<TaskObject> = assignment
            .iter()
            .map(|(slot, model)| TaskObject {
                instance_id: slot.clone(),
                model_id: model.model_id.clone(),
                category: model.category.clone(),
                bbox: model.bbox,
            })
            .collect();
        let mut scenes_ok = true;
        for (graph, config) in [(&template.initial, &initial), (&template.target, &target)] {
            let outcome = validate_scene(config, &objects, workspace, cfg)?;
            let extra = relation_violations(graph, config, &objects, &outcome.supporters);
            if !outcome.is_valid() || !extra.is_empty() {
                scenes_ok = false;
                break;
            }
        }
        if scenes_ok {
            let task = Task::new(task_id, set_tag, objects, initial, target)?;
            return Ok(GeneratedTask {
                task,
                template_id: template.template_id.clone(),
                seed: cfg.seed,
                rejections_used: attempt,
            });
        }
    }
    Err(SceneGenError::GenerationExhausted {
        template_id: template.template_id.clone(),
        attempts: cfg.max_rejections,
    })
}

/// Generates every entry's tasks with per-task derived seeds and splits the
/// batch into trial and contest sets.
///
/// Task k (counting across the whole batch) is seeded with
/// `splitmix64(cfg.seed ^ k)`; the first `round(total * trial_fraction)`
/// tasks are tagged as trial, the rest as contest.
pub fn generate_batch(
    entries: &[BatchEntry],
    db: &ObjectDatabase,
    workspace: &Workspace,
    cfg: &GenerationConfig,
    trial_fraction: f64,
) -> Result<Vec<GeneratedTask>, SceneGenError> {
    if !(0.0..=1.0).contains(&trial_fraction) {
        return Err(SceneGenError::BadTrialFraction(trial_fraction));
    }
    let total: usize = entries.iter().map(|e| e.count).sum();
    let trial_count = ((total as f64 * trial_fraction).round() as usize).min(total);
    let mut out = Vec::with_capacity(total);
    let mut k: u64 = 0;
    for entry in entries {
        for i in 0..entry.count {
            let task_seed = splitmix64(cfg.seed ^ k);
            let set_tag = if (k as usize) < trial_count {
                SetTag::Trial
            } else {
                SetTag::Contest
            };
            let task_cfg = GenerationConfig {
                seed: task_seed,
                ..*cfg
            };
            let task_id = format!("{}-{:04}", entry.template.template_id, i);
            out.push(generate_task(
                &task_id,
                set_tag,
                &entry.template,
                db,
                workspace,
                &task_cfg,
            )?);
            k += 1;
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct ManifestEntry<'a> {
    task_id: &'a str,
    file: String,
    template_id: &'a str,
    seed: u64,
    rejections_used: u32,
    set_tag: &'a SetTag,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tasks: Vec<ManifestEntry<'a>>,
}

/// Batch manifest: per task its file name, template, seed, and how many
/// attempts were rejected before it validated.
pub fn manifest_to_json(tasks: &[GeneratedTask]) -> String {
    let manifest = Manifest {
        tasks: tasks
            .iter()
            .map(|t| ManifestEntry {
                task_id: &t.task.task_id,
                file: format!("{}.json", t.task.task_id),
                template_id: &t.template_id,
                seed: t.seed,
                rejections_used: t.rejections_used,
                set_tag: &t.task.set_tag,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    text
}
