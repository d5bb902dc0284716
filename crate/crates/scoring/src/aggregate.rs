use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::ScoringError;
use crate::evaluate::TaskScore;

/// One evaluated run over a task set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunScore {
    pub run_id: String,
    pub task_scores: Vec<TaskScore>,
    /// Mean of the task errors.
    pub average_error: f64,
    pub total_execution_time_s: f64,
}

impl RunScore {
    /// Builds a run score, computing the average from the task scores.
    pub fn new(
        run_id: impl Into<String>,
        task_scores: Vec<TaskScore>,
        total_execution_time_s: f64,
    ) -> Result<Self, ScoringError> {
        if task_scores.is_empty() {
            return Err(ScoringError::EmptyRun);
        }
        let average_error =
            task_scores.iter().map(|t| t.task_error).sum::<f64>() / task_scores.len() as f64;
        Ok(RunScore {
            run_id: run_id.into(),
            task_scores,
            average_error,
            total_execution_time_s,
        })
    }
}

fn run_order(a: &RunScore, b: &RunScore) -> Ordering {
    a.average_error
        .total_cmp(&b.average_error)
        .then(
            a.total_execution_time_s
                .total_cmp(&b.total_execution_time_s),
        )
        .then_with(|| a.run_id.cmp(&b.run_id))
}

/// Picks the best run: lowest average error, then lowest time, then lowest run id.
pub fn aggregate_best_of_runs(runs: &[RunScore]) -> Result<&RunScore, ScoringError> {
    let mut best = runs.first().ok_or(ScoringError::EmptyInput)?;
    for run in &runs[1..] {
        if run_order(run, best) == Ordering::Less {
            best = run;
        }
    }
    Ok(best)
}

/// Picks the better of two runs; full ties keep the first argument.
pub fn aggregate_better_backend<'a>(a: &'a RunScore, b: &'a RunScore) -> &'a RunScore {
    if run_order(b, a) == Ordering::Less {
        b
    } else {
        a
    }
}
