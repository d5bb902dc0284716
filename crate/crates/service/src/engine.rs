//! Contest state machine: ingest, evaluation, ranking, persistence.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tablebench_core::files::{scene_config_from_dto, task_from_json, task_to_json};
use tablebench_core::Task;
use tablebench_harness::execute;
use tablebench_scoring::{
    aggregate_best_of_runs, aggregate_better_backend, evaluate_task, improvement, rank, GraspStats,
    MissingObjectMode, RunScore, TeamResult,
};

use crate::error::ServiceError;
use crate::store::{ContestStore, Event};
use crate::types::{
    ContestConfig, DisplayRule, LeaderboardSnapshot, Payload, Selection, Stage, SubmissionRecord,
    SubmissionStatus, TaskSet,
};

#[derive(Serialize, Deserialize)]
struct ContestFile {
    config: ContestConfig,
    trial_tasks: Vec<serde_json::Value>,
    contest_tasks: Vec<serde_json::Value>,
}

fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// One contest: its configuration, task sets, and full submission history,
/// backed by an append-only log.
pub struct ContestEngine {
    store: ContestStore,
    config: ContestConfig,
    tasks: TaskSet,
    stage: Stage,
    records: BTreeMap<String, SubmissionRecord>,
}

impl ContestEngine {
    /// Sets up the on-disk layout for a new contest.
    pub fn create(
        root: &Path,
        config: ContestConfig,
        tasks: TaskSet,
    ) -> Result<Self, ServiceError> {
        config.validate()?;
        if tasks.contest.is_empty() {
            return Err(ServiceError::BadContestConfig(
                "a contest needs at least one contest task".into(),
            ));
        }
        if config.stage == Stage::Trial && tasks.trial.is_empty() {
            return Err(ServiceError::BadContestConfig(
                "a contest starting in the trial stage needs trial tasks".into(),
            ));
        }
        let store = ContestStore::new(root.join(&config.contest_id));
        if store.contest_path().exists() {
            return Err(ServiceError::ContestExists(config.contest_id.clone()));
        }
        fs::create_dir_all(store.dir())?;
        let file = ContestFile {
            config: config.clone(),
            trial_tasks: tasks_to_values(&tasks.trial)?,
            contest_tasks: tasks_to_values(&tasks.contest)?,
        };
        fs::write(
            store.contest_path(),
            format!("{}\n", serde_json::to_string_pretty(&file)?),
        )?;
        let stage = config.stage;
        Ok(ContestEngine {
            store,
            config,
            tasks,
            stage,
            records: BTreeMap::new(),
        })
    }

    /// Loads a contest from disk, replaying its event log.
    pub fn open(root: &Path, contest_id: &str) -> Result<Self, ServiceError> {
        let store = ContestStore::new(root.join(contest_id));
        if !store.contest_path().exists() {
            return Err(ServiceError::UnknownContest(contest_id.to_string()));
        }
        let file: ContestFile = serde_json::from_str(&fs::read_to_string(store.contest_path())?)?;
        file.config.validate()?;
        if file.config.contest_id != contest_id {
            return Err(ServiceError::CorruptStore(format!(
                "contest file says `{}` but lives under `{contest_id}`",
                file.config.contest_id
            )));
        }
        let tasks = TaskSet {
            trial: tasks_from_values(&file.trial_tasks)?,
            contest: tasks_from_values(&file.contest_tasks)?,
        };
        let mut engine = ContestEngine {
            store,
            stage: file.config.stage,
            config: file.config,
            tasks,
            records: BTreeMap::new(),
        };
        for event in engine.store.recover()? {
            engine.apply(event)?;
        }
        Ok(engine)
    }

    pub fn exists(root: &Path, contest_id: &str) -> bool {
        root.join(contest_id).join("contest.json").exists()
    }

    fn apply(&mut self, event: Event) -> Result<(), ServiceError> {
        match event {
            Event::Submission { record } => {
                self.records.insert(record.submission_id.clone(), record);
            }
            Event::Status {
                submission_id,
                status,
            } => {
                let record = self.records.get_mut(&submission_id).ok_or_else(|| {
                    ServiceError::CorruptStore(format!(
                        "status event for unknown submission `{submission_id}`"
                    ))
                })?;
                record.status = status;
            }
            Event::StageChanged { stage } => self.stage = stage,
        }
        Ok(())
    }

    pub fn config(&self) -> &ContestConfig {
        &self.config
    }

    pub fn contest_id(&self) -> &str {
        &self.config.contest_id
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    /// Tasks a submission received in `stage` is evaluated against.
    pub fn tasks_for(&self, stage: Stage) -> &[Task] {
        match stage {
            Stage::Trial => &self.tasks.trial,
            Stage::Contest | Stage::Closed => &self.tasks.contest,
        }
    }

    /// Tasks the contest currently hands out and accepts solutions for.
    pub fn active_tasks(&self) -> &[Task] {
        self.tasks_for(self.stage)
    }

    /// Moves the stage forward; the declaration order is the only legal
    /// direction.
    pub fn advance_stage(&mut self, to: Stage) -> Result<Stage, ServiceError> {
        if to <= self.stage {
            return Err(ServiceError::InvalidTransition {
                from: self.stage,
                to,
            });
        }
        self.store.append(&Event::StageChanged { stage: to })?;
        self.stage = to;
        Ok(self.stage)
    }

    /// Persists a submission durably and acknowledges it as Queued.
    pub fn submit(&mut self, team_id: &str, payload: Payload) -> Result<String, ServiceError> {
        if self.stage == Stage::Closed {
            return Err(ServiceError::ContestClosed(self.config.contest_id.clone()));
        }
        if team_id.is_empty() {
            return Err(ServiceError::InvalidPayload("team id is empty".into()));
        }
        let bytes = serde_json::to_vec(&payload)?.len() as u64;
        if bytes > self.config.max_payload_bytes {
            return Err(ServiceError::PayloadTooLarge {
                bytes,
                cap: self.config.max_payload_bytes,
            });
        }
        self.check_payload(&payload)?;
        let submission_id = format!("s-{:06}", self.records.len() + 1);
        let record = SubmissionRecord {
            submission_id: submission_id.clone(),
            team_id: team_id.to_string(),
            stage: self.stage,
            received_at: now_rfc3339(),
            payload,
            status: SubmissionStatus::Queued,
        };
        self.store.append(&Event::Submission {
            record: record.clone(),
        })?;
        self.records.insert(submission_id.clone(), record);
        Ok(submission_id)
    }

    fn check_payload(&self, payload: &Payload) -> Result<(), ServiceError> {
        let expected: BTreeSet<&str> = self
            .active_tasks()
            .iter()
            .map(|t| t.task_id.as_str())
            .collect();
        if expected.is_empty() {
            return Err(ServiceError::TaskSetMismatch(
                "the current stage has no tasks".into(),
            ));
        }
        let mut backend_counts: BTreeMap<u32, u32> = BTreeMap::new();
        let check_tasks = |run_index: usize, ids: BTreeSet<&str>| {
            for id in &expected {
                if !ids.contains(id) {
                    return Err(ServiceError::TaskSetMismatch(format!(
                        "run {run_index} is missing task `{id}`"
                    )));
                }
            }
            for id in ids {
                if !expected.contains(id) {
                    return Err(ServiceError::TaskSetMismatch(format!(
                        "run {run_index} covers unknown task `{id}`"
                    )));
                }
            }
            Ok(())
        };
        let mut note_backend = |run_index: usize, backend: u32| {
            if !(1..=self.config.backends).contains(&backend) {
                return Err(ServiceError::InvalidPayload(format!(
                    "run {run_index} names backend {backend}, contest has {}",
                    self.config.backends
                )));
            }
            let count = backend_counts.entry(backend).or_insert(0);
            *count += 1;
            if *count > self.config.runs_per_team {
                return Err(ServiceError::InvalidPayload(format!(
                    "more than {} runs on backend {backend}",
                    self.config.runs_per_team
                )));
            }
            Ok(())
        };
        match payload {
            Payload::PrecomputedRuns { runs } => {
                if runs.is_empty() {
                    return Err(ServiceError::InvalidPayload("no runs".into()));
                }
                for (i, run) in runs.iter().enumerate() {
                    note_backend(i, run.backend)?;
                    check_tasks(i, run.tasks.keys().map(String::as_str).collect())?;
                    for (task_id, entry) in &run.tasks {
                        if !entry.execution_time_s.is_finite() || entry.execution_time_s < 0.0 {
                            return Err(ServiceError::InvalidPayload(format!(
                                "run {i} task `{task_id}` has a bad execution time"
                            )));
                        }
                        scene_config_from_dto(&entry.solution).map_err(|e| {
                            ServiceError::InvalidPayload(format!("run {i} task `{task_id}`: {e}"))
                        })?;
                    }
                    if run.grasp.successes > run.grasp.attempts {
                        return Err(ServiceError::InvalidPayload(format!(
                            "run {i} reports more grasp successes than attempts"
                        )));
                    }
                }
            }
            Payload::Scripts { runs } => {
                if runs.is_empty() {
                    return Err(ServiceError::InvalidPayload("no runs".into()));
                }
                for (i, run) in runs.iter().enumerate() {
                    note_backend(i, run.backend)?;
                    check_tasks(i, run.scripts.keys().map(String::as_str).collect())?;
                }
            }
        }
        Ok(())
    }

    pub fn submission(&self, submission_id: &str) -> Option<&SubmissionRecord> {
        self.records.get(submission_id)
    }

    pub fn submissions(&self) -> impl Iterator<Item = &SubmissionRecord> {
        self.records.values()
    }

    /// Scores a submission. Terminal submissions are returned as-is, so a
    /// retry never rewrites history; an interrupted evaluation picks up
    /// where it left off.
    pub fn evaluate_submission(
        &mut self,
        submission_id: &str,
    ) -> Result<&SubmissionRecord, ServiceError> {
        let record = self
            .records
            .get(submission_id)
            .ok_or_else(|| ServiceError::UnknownSubmission(submission_id.to_string()))?
            .clone();
        if record.status.is_terminal() {
            return Ok(&self.records[submission_id]);
        }
        if record.status == SubmissionStatus::Queued {
            self.commit_status(submission_id, SubmissionStatus::Evaluating)?;
        }
        let status = match self.evaluate_payload(&record) {
            Ok((run, grasp)) => SubmissionStatus::Scored { run, grasp },
            Err(err) => SubmissionStatus::Rejected {
                reason: err.to_string(),
            },
        };
        self.commit_status(submission_id, status)?;
        self.store.write_snapshot(&format!(
            "{}\n",
            serde_json::to_string_pretty(&self.leaderboard()?)?
        ))?;
        Ok(&self.records[submission_id])
    }

    fn commit_status(
        &mut self,
        submission_id: &str,
        status: SubmissionStatus,
    ) -> Result<(), ServiceError> {
        self.store.append(&Event::Status {
            submission_id: submission_id.to_string(),
            status: status.clone(),
        })?;
        self.records
            .get_mut(submission_id)
            .expect("checked above")
            .status = status;
        Ok(())
    }

    /// Scores every run, then keeps the best run per backend and the better
    /// backend overall. Grasp statistics follow the winning run.
    fn evaluate_payload(
        &self,
        record: &SubmissionRecord,
    ) -> Result<(RunScore, GraspStats), ServiceError> {
        let tasks = self.tasks_for(record.stage);
        let policy = &self.config.policy;
        let mut per_backend: BTreeMap<u32, Vec<(RunScore, GraspStats)>> = BTreeMap::new();
        match &record.payload {
            Payload::PrecomputedRuns { runs } => {
                for (i, run) in runs.iter().enumerate() {
                    let mut task_scores = Vec::with_capacity(tasks.len());
                    let mut total_time = 0.0;
                    for task in tasks {
                        let entry = run.tasks.get(&task.task_id).ok_or_else(|| {
                            ServiceError::TaskSetMismatch(format!(
                                "run {i} is missing task `{}`",
                                task.task_id
                            ))
                        })?;
                        let solution = scene_config_from_dto(&entry.solution)?;
                        task_scores.push(evaluate_task(
                            task,
                            &solution,
                            policy,
                            MissingObjectMode::Lenient,
                        )?);
                        total_time += entry.execution_time_s;
                    }
                    let run_id = format!("b{}-r{:02}", run.backend, i + 1);
                    per_backend
                        .entry(run.backend)
                        .or_default()
                        .push((RunScore::new(run_id, task_scores, total_time)?, run.grasp));
                }
            }
            Payload::Scripts { runs } => {
                let exec_cfg = self.config.execution.to_execution_config()?;
                for (i, run) in runs.iter().enumerate() {
                    let mut task_scores = Vec::with_capacity(tasks.len());
                    let mut total_time = 0.0;
                    let mut grasp = GraspStats::default();
                    for task in tasks {
                        let script = run.scripts.get(&task.task_id).ok_or_else(|| {
                            ServiceError::TaskSetMismatch(format!(
                                "run {i} is missing task `{}`",
                                task.task_id
                            ))
                        })?;
                        let report = execute(task, script, &exec_cfg)?;
                        task_scores.push(evaluate_task(
                            task,
                            &report.final_config,
                            policy,
                            MissingObjectMode::Lenient,
                        )?);
                        total_time += report.elapsed_s;
                        grasp.attempts += report.grasp_attempts;
                        grasp.successes += report.grasp_successes;
                    }
                    let run_id = format!("b{}-r{:02}", run.backend, i + 1);
                    per_backend
                        .entry(run.backend)
                        .or_default()
                        .push((RunScore::new(run_id, task_scores, total_time)?, grasp));
                }
            }
        }
        let mut winner: Option<(RunScore, GraspStats)> = None;
        for runs in per_backend.into_values() {
            let scores: Vec<RunScore> = runs.iter().map(|(r, _)| r.clone()).collect();
            let best = aggregate_best_of_runs(&scores)?;
            let index = scores
                .iter()
                .position(|r| std::ptr::eq(r, best))
                .expect("best run comes from the slice");
            let candidate = runs[index].clone();
            winner = Some(match winner {
                None => candidate,
                Some(current) => {
                    let keep_candidate = std::ptr::eq(
                        aggregate_better_backend(&current.0, &candidate.0),
                        &candidate.0,
                    );
                    if keep_candidate {
                        candidate
                    } else {
                        current
                    }
                }
            });
        }
        winner.ok_or_else(|| ServiceError::InvalidPayload("no runs".into()))
    }

    /// Error of the do-nothing baseline on the contest task set, cm.
    pub fn baseline_error(&self) -> f64 {
        let tasks = &self.tasks.contest;
        tasks
            .iter()
            .map(|t| tablebench_scoring::baseline_error(t, &self.config.policy))
            .sum::<f64>()
            / tasks.len() as f64
    }

    /// Current standings over contest-stage submissions. Trial submissions
    /// never appear here.
    pub fn leaderboard(&self) -> Result<LeaderboardSnapshot, ServiceError> {
        let baseline = self.baseline_error();
        let mut per_team: BTreeMap<&str, Vec<&SubmissionRecord>> = BTreeMap::new();
        for record in self.records.values() {
            if record.stage == Stage::Contest
                && matches!(record.status, SubmissionStatus::Scored { .. })
            {
                per_team.entry(&record.team_id).or_default().push(record);
            }
        }
        let mut results = Vec::with_capacity(per_team.len());
        for (team_id, records) in per_team {
            let chosen = match self.config.selection {
                // Records iterate in submission order, so `last` is latest.
                Selection::Latest => *records.last().expect("nonempty group"),
                Selection::Best => records
                    .iter()
                    .copied()
                    .min_by(|a, b| {
                        let (ra, _) = scored_parts(a);
                        let (rb, _) = scored_parts(b);
                        ra.average_error
                            .total_cmp(&rb.average_error)
                            .then(
                                ra.total_execution_time_s
                                    .total_cmp(&rb.total_execution_time_s),
                            )
                            .then_with(|| a.submission_id.cmp(&b.submission_id))
                    })
                    .expect("nonempty group"),
            };
            let (run, grasp) = scored_parts(chosen);
            results.push(TeamResult {
                team_id: team_id.to_string(),
                final_error: run.average_error,
                improvement_pct: improvement(run.average_error, baseline)?,
                total_execution_time_s: run.total_execution_time_s,
                grasp: *grasp,
            });
        }
        if self.config.display == DisplayRule::BeatBaselineOnly {
            results.retain(|r| r.improvement_pct > 0.0);
        }
        Ok(LeaderboardSnapshot {
            contest_id: self.config.contest_id.clone(),
            entries: rank(results),
            generated_at: now_rfc3339(),
            baseline_error: baseline,
        })
    }
}

fn scored_parts(record: &SubmissionRecord) -> (&RunScore, &GraspStats) {
    match &record.status {
        SubmissionStatus::Scored { run, grasp } => (run, grasp),
        _ => unreachable!("caller filters to scored records"),
    }
}

fn tasks_to_values(tasks: &[Task]) -> Result<Vec<serde_json::Value>, ServiceError> {
    tasks
        .iter()
        .map(|t| Ok(serde_json::from_str(&task_to_json(t))?))
        .collect()
}

fn tasks_from_values(values: &[serde_json::Value]) -> Result<Vec<Task>, ServiceError> {
    values
        .iter()
        .map(|v| Ok(task_from_json(&v.to_string())?))
        .collect()
}
