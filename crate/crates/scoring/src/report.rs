use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aggregate::RunScore;
use crate::error::ScoringError;
use crate::evaluate::TaskScore;
use crate::policy::UebPolicy;
use crate::rank::{grasp_success_rate, GraspStats, RankedEntry};
use crate::round::{format_error_cm, format_grasp_rate, format_percent};

/// Persisted scoring result for one team over a task set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub team_id: String,
    pub policy: UebPolicy,
    pub tasks: Vec<TaskScore>,
    pub average_error: f64,
    pub total_execution_time_s: f64,
    pub grasp: GraspStats,
}

impl ScoreReport {
    /// Wraps an evaluated run for persistence.
    pub fn from_run(
        team_id: impl Into<String>,
        policy: UebPolicy,
        run: &RunScore,
        grasp: GraspStats,
    ) -> Self {
        ScoreReport {
            team_id: team_id.into(),
            policy,
            tasks: run.task_scores.clone(),
            average_error: run.average_error,
            total_execution_time_s: run.total_execution_time_s,
            grasp,
        }
    }

    /// Rebuilds a run score; the average is recomputed from the task list.
    pub fn to_run(&self, run_id: impl Into<String>) -> Result<RunScore, ScoringError> {
        RunScore::new(run_id, self.tasks.clone(), self.total_execution_time_s)
    }
}

/// Serializes a report; same report always yields identical bytes.
pub fn report_to_json(report: &ScoreReport) -> Result<String, ScoringError> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

pub fn report_from_json(text: &str) -> Result<ScoreReport, ScoringError> {
    let report: ScoreReport = serde_json::from_str(text)?;
    report.policy.validate()?;
    Ok(report)
}

pub fn write_report(path: &Path, report: &ScoreReport) -> Result<(), ScoringError> {
    Ok(fs::write(path, report_to_json(report)?)?)
}

pub fn read_report(path: &Path) -> Result<ScoreReport, ScoringError> {
    report_from_json(&fs::read_to_string(path)?)
}

/// Renders a leaderboard as CSV: rank, team_id, error_cm, improvement_pct,
/// time_s, grasp_rate. The optional baseline appears as a trailing row.
pub fn leaderboard_csv(
    entries: &[RankedEntry],
    baseline_error: Option<f64>,
) -> Result<String, ScoringError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record([
        "rank",
        "team_id",
        "error_cm",
        "improvement_pct",
        "time_s",
        "grasp_rate",
    ])?;
    for entry in entries {
        writer.write_record([
            entry.rank.to_string(),
            entry.team_id.clone(),
            format_error_cm(entry.final_error),
            format_percent(entry.improvement_pct),
            format!("{:.1}", entry.total_execution_time_s),
            format_grasp_rate(grasp_success_rate(entry.grasp)?),
        ])?;
    }
    if let Some(baseline) = baseline_error {
        writer.write_record([
            "-".to_string(),
            "baseline".to_string(),
            format_error_cm(baseline),
            format_percent(0.0),
            "-".to_string(),
            "N/A".to_string(),
        ])?;
    }
    let bytes = writer.into_inner().expect("csv writes to memory");
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
