//! Scoring for tabletop rearrangement: pose-error metric, per-task
//! evaluation with capping, baselines, run aggregation, and ranking.

mod aggregate;
mod error;
mod evaluate;
mod metric;
mod policy;
mod rank;
mod report;
mod round;

pub use aggregate::{aggregate_best_of_runs, aggregate_better_backend, RunScore};
pub use error::ScoringError;
pub use evaluate::{
    baseline_error, baseline_error_sum, display_improvement, evaluate_task, improvement,
    MissingObjectMode, TaskScore,
};
pub use metric::ede;
pub use policy::{ueb, UebPolicy};
pub use rank::{grasp_success_rate, rank, GraspStats, RankedEntry, TeamResult};
pub use report::{
    leaderboard_csv, read_report, report_from_json, report_to_json, write_report, ScoreReport,
};
pub use round::{format_error_cm, format_grasp_rate, format_percent, round_half_away};
