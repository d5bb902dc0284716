//! On-disk form of execution reports.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tablebench_core::files::PoseDto;
use tablebench_core::SceneConfiguration;

use crate::error::HarnessError;
use crate::execute::{ActionRecord, ExecutionReport, Termination};

#[derive(Serialize, Deserialize)]
struct ReportDto {
    #[serde(rename = "final")]
    final_config: BTreeMap<String, PoseDto>,
    elapsed_s: f64,
    grasp_attempts: u64,
    grasp_successes: u64,
    terminated: Termination,
    action_log: Vec<ActionRecord>,
}

/// Serializes a report to pretty-printed JSON with a trailing newline.
pub fn report_to_json(report: &ExecutionReport) -> Result<String, HarnessError> {
    let dto = ReportDto {
        final_config: report
            .final_config
            .iter()
            .map(|(id, pose)| (id.to_string(), PoseDto::from_pose(pose)))
            .collect(),
        elapsed_s: report.elapsed_s,
        grasp_attempts: report.grasp_attempts,
        grasp_successes: report.grasp_successes,
        terminated: report.terminated,
        action_log: report.action_log.clone(),
    };
    Ok(format!("{}\n", serde_json::to_string_pretty(&dto)?))
}

pub fn report_from_json(text: &str) -> Result<ExecutionReport, HarnessError> {
    let dto: ReportDto = serde_json::from_str(text)?;
    let mut final_config = SceneConfiguration::new();
    for (id, pose) in &dto.final_config {
        final_config.set(id, pose.to_pose()?);
    }
    Ok(ExecutionReport {
        final_config,
        elapsed_s: dto.elapsed_s,
        grasp_attempts: dto.grasp_attempts,
        grasp_successes: dto.grasp_successes,
        terminated: dto.terminated,
        action_log: dto.action_log,
    })
}

pub fn read_report(path: &Path) -> Result<ExecutionReport, HarnessError> {
    report_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_report(path: &Path, report: &ExecutionReport) -> Result<(), HarnessError> {
    Ok(std::fs::write(path, report_to_json(report)?)?)
}
