use serde::{Deserialize, Serialize};

use crate::error::ScoringError;

/// Grasp attempt counters accumulated over a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GraspStats {
    pub successes: u64,
    pub attempts: u64,
}

/// Fraction of attempted grasps that succeeded; None when nothing was attempted.
pub fn grasp_success_rate(stats: GraspStats) -> Result<Option<f64>, ScoringError> {
    if stats.successes > stats.attempts {
        return Err(ScoringError::InvalidCounts {
            successes: stats.successes,
            attempts: stats.attempts,
        });
    }
    if stats.attempts == 0 {
        return Ok(None);
    }
    Ok(Some(stats.successes as f64 / stats.attempts as f64))
}

/// One team's aggregated result, before ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TeamResult {
    pub team_id: String,
    pub final_error: f64,
    /// Signed improvement over the baseline, percent.
    pub improvement_pct: f64,
    pub total_execution_time_s: f64,
    pub grasp: GraspStats,
}

/// A leaderboard row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub rank: usize,
    pub team_id: String,
    pub final_error: f64,
    pub improvement_pct: f64,
    pub total_execution_time_s: f64,
    pub grasp: GraspStats,
    /// True when the team beat the baseline.
    pub qualified: bool,
}

/// Orders teams by (error, time, team id) and assigns ranks 1..n.
pub fn rank(mut results: Vec<TeamResult>) -> Vec<RankedEntry> {
    results.sort_by(|a, b| {
        a.final_error
            .total_cmp(&b.final_error)
            .then(
                a.total_execution_time_s
                    .total_cmp(&b.total_execution_time_s),
            )
            .then_with(|| a.team_id.cmp(&b.team_id))
    });
    results
        .into_iter()
        .enumerate()
        .map(|(i, r)| RankedEntry {
            rank: i + 1,
            qualified: r.improvement_pct > 0.0,
            team_id: r.team_id,
            final_error: r.final_error,
            improvement_pct: r.improvement_pct,
            total_execution_time_s: r.total_execution_time_s,
            grasp: r.grasp,
        })
        .collect()
}
