//! Contest domain types and their on-disk forms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use tablebench_core::files::PoseDto;
use tablebench_core::Task;
use tablebench_harness::{ActionScript, ExecutionConfig, NoiseConfig};
use tablebench_scenegen::files::WorkspaceDto;
use tablebench_scenegen::GenerationConfig;
use tablebench_scoring::{GraspStats, RankedEntry, RunScore, UebPolicy};

use crate::error::ServiceError;

/// Contest lifecycle stage; the declaration order is the only legal
/// direction of travel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    #[default]
    Trial,
    Contest,
    Closed,
}

/// Which of a team's scored submissions the leaderboard shows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    #[default]
    Best,
    Latest,
}

/// Which teams the leaderboard lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DisplayRule {
    /// Only teams whose improvement over the baseline is positive.
    #[default]
    BeatBaselineOnly,
    All,
}

/// Noise settings for script execution, as stored in the contest file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSettings {
    pub grasp_fail_prob: f64,
    pub place_jitter_sigma_cm: f64,
    pub seed: u64,
}

/// Execution parameters for script payloads, as stored in the contest file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExecutionSettings {
    #[serde(default = "default_time_limit")]
    pub time_limit_s: f64,
    #[serde(default = "default_action_cost")]
    pub per_action_cost_s: f64,
    pub workspace: WorkspaceDto,
    #[serde(default = "default_clearance_tol")]
    pub clearance_tol: f64,
    #[serde(default = "default_support_tol")]
    pub support_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSettings>,
}

fn default_time_limit() -> f64 {
    600.0
}

fn default_action_cost() -> f64 {
    15.0
}

fn default_clearance_tol() -> f64 {
    GenerationConfig::default().clearance_tol
}

fn default_support_tol() -> f64 {
    GenerationConfig::default().support_tol
}

impl ExecutionSettings {
    pub fn new(workspace: WorkspaceDto) -> Self {
        ExecutionSettings {
            time_limit_s: default_time_limit(),
            per_action_cost_s: default_action_cost(),
            workspace,
            clearance_tol: default_clearance_tol(),
            support_tol: default_support_tol(),
            noise: None,
        }
    }

    pub fn to_execution_config(&self) -> Result<ExecutionConfig, ServiceError> {
        let mut cfg = ExecutionConfig::new(self.workspace.to_workspace()?);
        cfg.time_limit_s = self.time_limit_s;
        cfg.per_action_cost_s = self.per_action_cost_s;
        cfg.clearance_tol = self.clearance_tol;
        cfg.support_tol = self.support_tol;
        cfg.noise = self.noise.map(|n| NoiseConfig {
            grasp_fail_prob: n.grasp_fail_prob,
            place_jitter_sigma_cm: n.place_jitter_sigma_cm,
            seed: n.seed,
        });
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Static setup of one contest.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContestConfig {
    pub contest_id: String,
    pub policy: UebPolicy,
    #[serde(default = "default_runs_per_team")]
    pub runs_per_team: u32,
    #[serde(default = "default_backends")]
    pub backends: u32,
    #[serde(default)]
    pub stage: Stage,
    #[serde(default)]
    pub selection: Selection,
    #[serde(default)]
    pub display: DisplayRule,
    #[serde(default = "default_payload_cap")]
    pub max_payload_bytes: u64,
    pub execution: ExecutionSettings,
}

fn default_runs_per_team() -> u32 {
    3
}

fn default_backends() -> u32 {
    1
}

fn default_payload_cap() -> u64 {
    4 * 1024 * 1024
}

impl ContestConfig {
    pub fn validate(&self) -> Result<(), ServiceError> {
        if self.contest_id.is_empty()
            || !self
                .contest_id
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(ServiceError::BadContestConfig(format!(
                "contest id `{}` must be nonempty alphanumeric/dash/underscore",
                self.contest_id
            )));
        }
        self.policy
            .validate()
            .map_err(|e| ServiceError::BadContestConfig(e.to_string()))?;
        if self.runs_per_team < 1 {
            return Err(ServiceError::BadContestConfig(
                "runs_per_team must be at least 1".into(),
            ));
        }
        if !(1..=2).contains(&self.backends) {
            return Err(ServiceError::BadContestConfig(format!(
                "backends must be 1 or 2, got {}",
                self.backends
            )));
        }
        if self.stage == Stage::Closed {
            return Err(ServiceError::BadContestConfig(
                "a contest cannot start closed".into(),
            ));
        }
        if self.max_payload_bytes == 0 {
            return Err(ServiceError::BadContestConfig(
                "max_payload_bytes must be positive".into(),
            ));
        }
        self.execution
            .to_execution_config()
            .map_err(|e| ServiceError::BadContestConfig(e.to_string()))?;
        Ok(())
    }
}

/// Tasks a contest evaluates against, split by stage.
#[derive(Debug, Clone, Default)]
pub struct TaskSet {
    pub trial: Vec<Task>,
    pub contest: Vec<Task>,
}

/// Final scene for one task plus the time the solver spent on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSolution {
    pub solution: BTreeMap<String, PoseDto>,
    pub execution_time_s: f64,
}

fn default_backend_id() -> u32 {
    1
}

/// One evaluation run of precomputed results on some backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecomputedRun {
    #[serde(default = "default_backend_id")]
    pub backend: u32,
    /// Keyed by task id; must cover the active task set exactly.
    pub tasks: BTreeMap<String, TaskSolution>,
    #[serde(default)]
    pub grasp: GraspStats,
}

/// One run of action scripts on some backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScriptRun {
    #[serde(default = "default_backend_id")]
    pub backend: u32,
    /// Keyed by task id; must cover the active task set exactly.
    pub scripts: BTreeMap<String, ActionScript>,
}

/// What a team submits: either already-executed results or scripts for the
/// harness to run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    PrecomputedRuns { runs: Vec<PrecomputedRun> },
    Scripts { runs: Vec<ScriptRun> },
}

/// Where a submission is in its life. Transitions only move forward:
/// Queued, then Evaluating, then exactly one of Scored or Rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum SubmissionStatus {
    Queued,
    Evaluating,
    Scored { run: RunScore, grasp: GraspStats },
    Rejected { reason: String },
}

impl SubmissionStatus {
    pub fn name(&self) -> &'static str {
        match self {
            SubmissionStatus::Queued => "queued",
            SubmissionStatus::Evaluating => "evaluating",
            SubmissionStatus::Scored { .. } => "scored",
            SubmissionStatus::Rejected { .. } => "rejected",
        }
    }

    pub fn is_terminal(&self) -> bool {
        matches!(
            self,
            SubmissionStatus::Scored { .. } | SubmissionStatus::Rejected { .. }
        )
    }
}

fn default_status() -> SubmissionStatus {
    SubmissionStatus::Queued
}

/// One team upload and everything known about it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmissionRecord {
    pub submission_id: String,
    pub team_id: String,
    /// Stage the submission was received in; pins its task set for good.
    pub stage: Stage,
    pub received_at: String,
    pub payload: Payload,
    #[serde(default = "default_status")]
    pub status: SubmissionStatus,
}

/// Ranked standings at one point in time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardSnapshot {
    pub contest_id: String,
    pub entries: Vec<RankedEntry>,
    pub generated_at: String,
    /// Error of the do-nothing baseline on the contest task set, cm.
    pub baseline_error: f64,
}
