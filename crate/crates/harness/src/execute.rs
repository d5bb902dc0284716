//! Kinematic execution of action scripts against a task's initial scene.

use std::collections::BTreeMap;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use tablebench_core::{Pose, SceneConfiguration, Task, TaskObject};
use tablebench_scenegen::{validate_scene, GenerationConfig, Obb, Support, Violation, Workspace};

use crate::error::HarnessError;
use crate::script::{Action, ActionScript};

/// A place farther outside the workspace than this aborts the run, cm.
pub const HAZARD_MARGIN_CM: f64 = 10.0;

/// Stochastic disturbances applied during execution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    /// Probability that an otherwise feasible grasp slips.
    pub grasp_fail_prob: f64,
    /// Standard deviation of the lateral (x, y) placement error, cm.
    pub place_jitter_sigma_cm: f64,
    pub seed: u64,
}

/// Knobs for one execution.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionConfig {
    pub time_limit_s: f64,
    pub per_action_cost_s: f64,
    pub noise: Option<NoiseConfig>,
    /// Table bounds shared by the hazard and validity checks.
    pub workspace: Workspace,
    /// Interpenetration allowance for placement validity, cm.
    pub clearance_tol: f64,
    /// Resting-contact slack for placement validity, cm.
    pub support_tol: f64,
}

impl ExecutionConfig {
    /// Standard limits: a 600 s budget at 15 s per action, no noise.
    pub fn new(workspace: Workspace) -> Self {
        let validity = GenerationConfig::default();
        ExecutionConfig {
            time_limit_s: 600.0,
            per_action_cost_s: 15.0,
            noise: None,
            workspace,
            clearance_tol: validity.clearance_tol,
            support_tol: validity.support_tol,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if !self.time_limit_s.is_finite() || self.time_limit_s <= 0.0 {
            return Err(HarnessError::BadConfig(format!(
                "time limit must be positive, got {}",
                self.time_limit_s
            )));
        }
        if !self.per_action_cost_s.is_finite() || self.per_action_cost_s < 0.0 {
            return Err(HarnessError::BadConfig(format!(
                "per-action cost must be nonnegative, got {}",
                self.per_action_cost_s
            )));
        }
        for (name, value) in [
            ("clearance tolerance", self.clearance_tol),
            ("support tolerance", self.support_tol),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(HarnessError::BadConfig(format!(
                    "{name} must be nonnegative, got {value}"
                )));
            }
        }
        if let Some(noise) = &self.noise {
            if !noise.grasp_fail_prob.is_finite() || !(0.0..=1.0).contains(&noise.grasp_fail_prob) {
                return Err(HarnessError::BadConfig(format!(
                    "grasp failure probability must lie in [0, 1], got {}",
                    noise.grasp_fail_prob
                )));
            }
            if !noise.place_jitter_sigma_cm.is_finite() || noise.place_jitter_sigma_cm < 0.0 {
                return Err(HarnessError::BadConfig(format!(
                    "place jitter sigma must be nonnegative, got {}",
                    noise.place_jitter_sigma_cm
                )));
            }
        }
        Ok(())
    }
}

/// Why an execution stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// Every action was processed.
    Completed,
    /// The next action would have exceeded the time budget.
    TimeLimit,
    /// A place left the workspace by more than the hazard margin.
    Hazard,
}

/// What one processed action did to the world.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum ActionOutcome {
    /// The action changed the world as requested.
    Succeeded,
    /// Pick refused: another object is resting on the target.
    Blocked,
    /// Pick refused: the grasp draw slipped.
    GraspFailed,
    /// Place refused: the gripper is empty because the pick failed.
    NotHolding,
    /// Place refused: the pose breaks a validity rule; the object went back.
    Rejected { reasons: Vec<String> },
    /// Place aborted the run: the pose leaves the workspace by too much.
    Hazard,
}

/// Log entry for one processed action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionRecord {
    /// `"pick"` or `"place"`.
    pub op: String,
    pub id: String,
    #[serde(flatten)]
    pub outcome: ActionOutcome,
}

/// Everything an execution produced.
#[derive(Debug, Clone, PartialEq)]
pub struct ExecutionReport {
    /// World configuration when execution stopped; covers every task object.
    pub final_config: SceneConfiguration,
    pub elapsed_s: f64,
    pub grasp_attempts: u64,
    pub grasp_successes: u64,
    pub terminated: Termination,
    pub action_log: Vec<ActionRecord>,
}

/// Runs `script` against the task's initial scene.
///
/// Actions are charged `per_action_cost_s` up front; an action whose cost
/// would push the total past `time_limit_s` is dropped along with everything
/// after it and the run stops with `TimeLimit`. A pick counts as a grasp
/// attempt and fails, without changing the world, when another object rests
/// on the target or when the grasp draw slips. A place first checks the
/// hazard bound (a pose more than [`HAZARD_MARGIN_CM`] outside the workspace
/// aborts the run), then scene validity restricted to rule breaks involving
/// the placed object; on rejection the object returns to its pre-pick pose.
/// Whatever is still held when the run stops is likewise returned to its
/// pre-pick pose, so the final configuration always covers every object.
///
/// With noise, all randomness comes from one ChaCha8 stream seeded by
/// `noise.seed`: each processed pick consumes exactly one uniform draw (even
/// when blocked), and each place of a held object consumes two normal draws,
/// x jitter then y jitter. Nothing else touches the stream, which is what
/// makes replays byte-identical.
pub fn execute(
    task: &Task,
    script: &ActionScript,
    cfg: &ExecutionConfig,
) -> Result<ExecutionReport, HarnessError> {
    cfg.validate()?;
    script.validate(task)?;
    let validity = GenerationConfig {
        seed: 0,
        max_rejections: 1,
        clearance_tol: cfg.clearance_tol,
        support_tol: cfg.support_tol,
    };
    let mut rng = cfg
        .noise
        .as_ref()
        .map(|n| ChaCha8Rng::seed_from_u64(n.seed));
    let jitter = match &cfg.noise {
        Some(noise) => Some(
            Normal::new(0.0, noise.place_jitter_sigma_cm)
                .map_err(|e| HarnessError::BadConfig(format!("place jitter: {e}")))?,
        ),
        None => None,
    };

    let mut world: BTreeMap<String, Pose> = task
        .initial
        .iter()
        .map(|(id, pose)| (id.to_string(), *pose))
        .collect();
    let mut held: Option<(String, Pose)> = None;
    let mut elapsed = 0.0;
    let mut attempts = 0u64;
    let mut successes = 0u64;
    let mut action_log = Vec::new();
    let mut terminated = Termination::Completed;

    for action in &script.actions {
        if elapsed + cfg.per_action_cost_s > cfg.time_limit_s {
            terminated = Termination::TimeLimit;
            break;
        }
        elapsed += cfg.per_action_cost_s;
        match action {
            Action::Pick { id } => {
                attempts += 1;
                let slipped = match (&cfg.noise, rng.as_mut()) {
                    (Some(noise), Some(rng)) => rng.random::<f64>() < noise.grasp_fail_prob,
                    _ => false,
                };
                let outcome = if pick_blocked(task, &world, &cfg.workspace, &validity, id)? {
                    ActionOutcome::Blocked
                } else if slipped {
                    ActionOutcome::GraspFailed
                } else {
                    successes += 1;
                    let pose = world
                        .remove(id)
                        .expect("non-held objects stay in the world");
                    held = Some((id.clone(), pose));
                    ActionOutcome::Succeeded
                };
                action_log.push(ActionRecord {
                    op: "pick".into(),
                    id: id.clone(),
                    outcome,
                });
            }
            Action::Place { id, pose } => {
                let outcome = match held.take() {
                    Some((held_id, pre_pick)) if held_id == *id => {
                        let mut place_pose = *pose;
                        if let (Some(normal), Some(rng)) = (&jitter, rng.as_mut()) {
                            place_pose.translation.x += normal.sample(rng);
                            place_pose.translation.y += normal.sample(rng);
                        }
                        let object = task.object(id).expect("validated instance");
                        let obb = Obb::from_pose(&object.bbox, &place_pose);
                        if workspace_excess(&obb, &cfg.workspace) > HAZARD_MARGIN_CM {
                            world.insert(id.clone(), pre_pick);
                            terminated = Termination::Hazard;
                            ActionOutcome::Hazard
                        } else {
                            world.insert(id.clone(), place_pose);
                            let config = SceneConfiguration::from_poses(world.clone());
                            let outcome =
                                validate_scene(&config, &task.objects, &cfg.workspace, &validity)?;
                            let reasons: Vec<String> = outcome
                                .violations
                                .iter()
                                .filter(|v| involves(v, id))
                                .map(Violation::to_string)
                                .collect();
                            if reasons.is_empty() {
                                ActionOutcome::Succeeded
                            } else {
                                world.insert(id.clone(), pre_pick);
                                ActionOutcome::Rejected { reasons }
                            }
                        }
                    }
                    other => {
                        held = other;
                        ActionOutcome::NotHolding
                    }
                };
                action_log.push(ActionRecord {
                    op: "place".into(),
                    id: id.clone(),
                    outcome,
                });
            }
        }
        if terminated == Termination::Hazard {
            break;
        }
    }

    if let Some((id, pre_pick)) = held.take() {
        world.insert(id, pre_pick);
    }
    Ok(ExecutionReport {
        final_config: SceneConfiguration::from_poses(world),
        elapsed_s: elapsed,
        grasp_attempts: attempts,
        grasp_successes: successes,
        terminated,
        action_log,
    })
}

/// Re-runs a script. The result is byte-identical across calls and machines
/// because `execute` draws all randomness, in a documented order, from one
/// stream seeded by the config.
pub fn replay_deterministic(
    task: &Task,
    script: &ActionScript,
    cfg: &ExecutionConfig,
) -> Result<ExecutionReport, HarnessError> {
    execute(task, script, cfg)
}

/// True if some other object currently rests on `id`.
fn pick_blocked(
    task: &Task,
    world: &BTreeMap<String, Pose>,
    workspace: &Workspace,
    validity: &GenerationConfig,
    id: &str,
) -> Result<bool, HarnessError> {
    let present: Vec<TaskObject> = task
        .objects
        .iter()
        .filter(|o| world.contains_key(&o.instance_id))
        .cloned()
        .collect();
    let config = SceneConfiguration::from_poses(world.clone());
    let outcome = validate_scene(&config, &present, workspace, validity)?;
    Ok(outcome
        .supporters
        .values()
        .any(|s| matches!(s, Support::OnInstance(parent) if parent == id)))
}

fn involves(violation: &Violation, id: &str) -> bool {
    match violation {
        Violation::Interpenetration { a, b, .. } => a == id || b == id,
        Violation::Unsupported { instance_id } | Violation::OutOfBounds { instance_id } => {
            instance_id == id
        }
        Violation::AdjacencyTooFar { parent, child, .. } => parent == id || child == id,
        Violation::WrongSupporter {
            child,
            expected_parent,
        } => child == id || expected_parent == id,
    }
}

/// Largest distance any corner of the box pokes outside the workspace, cm.
fn workspace_excess(obb: &Obb, ws: &Workspace) -> f64 {
    let mut worst = 0.0f64;
    for corner in obb.corners() {
        let dx = (ws.x_min - corner.x).max(corner.x - ws.x_max);
        let dy = (ws.y_min - corner.y).max(corner.y - ws.y_max);
        let dz = (ws.z0 - corner.z).max(corner.z - ws.z_max);
        worst = worst.max(dx).max(dy).max(dz);
    }
    worst
}
