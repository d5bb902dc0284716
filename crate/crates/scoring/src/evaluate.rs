use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use tablebench_core::{SceneConfiguration, Task};

use crate::error::ScoringError;
use crate::metric::ede;
use crate::policy::{ueb, UebPolicy};

/// What to do when a solution has no pose for an object.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MissingObjectMode {
    /// Score the object at its upper bound, as if it had been knocked away.
    Lenient,
    /// Refuse to score the task.
    Strict,
}

/// Scored result for a single task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskScore {
    pub task_id: String,
    /// Capped per-object error in cm, keyed by instance id.
    pub per_object_error: BTreeMap<String, f64>,
    /// Mean of the per-object errors.
    pub task_error: f64,
    /// How many objects scored their upper bound instead of the raw error.
    pub capped_count: usize,
}

/// Scores one task: each object contributes min(ede, ueb), averaged over objects.
///
/// In lenient mode an object the solution never placed scores exactly its
/// upper bound (and counts as capped); strict mode errors out instead.
pub fn evaluate_task(
    task: &Task,
    solution: &SceneConfiguration,
    policy: &UebPolicy,
    mode: MissingObjectMode,
) -> Result<TaskScore, ScoringError> {
    let mut per_object_error = BTreeMap::new();
    let mut capped_count = 0usize;
    for obj in &task.objects {
        let bound = ueb(&obj.bbox, policy);
        let target = task
            .target
            .get(&obj.instance_id)
            .expect("task invariant: target covers every object");
        let error = match solution.get(&obj.instance_id) {
            Some(solved) => {
                let raw = ede(&obj.bbox, target, solved);
                if raw >= bound {
                    capped_count += 1;
                    bound
                } else {
                    raw
                }
            }
            None => match mode {
                MissingObjectMode::Lenient => {
                    capped_count += 1;
                    bound
                }
                MissingObjectMode::Strict => {
                    return Err(ScoringError::MissingObject(obj.instance_id.clone()))
                }
            },
        };
        per_object_error.insert(obj.instance_id.clone(), error);
    }
    let task_error = per_object_error.values().sum::<f64>() / per_object_error.len() as f64;
    Ok(TaskScore {
        task_id: task.task_id.clone(),
        per_object_error,
        task_error,
        capped_count,
    })
}

/// Worst possible task error: the mean of the objects' upper bounds.
pub fn baseline_error(task: &Task, policy: &UebPolicy) -> f64 {
    baseline_error_sum(task, policy) / task.objects.len() as f64
}

/// Sum of the objects' upper bounds, without the per-object averaging.
pub fn baseline_error_sum(task: &Task, policy: &UebPolicy) -> f64 {
    task.objects.iter().map(|o| ueb(&o.bbox, policy)).sum()
}

/// Signed improvement over the baseline, in percent.
pub fn improvement(error: f64, baseline: f64) -> Result<f64, ScoringError> {
    if !baseline.is_finite() || baseline <= 0.0 {
        return Err(ScoringError::NonPositiveBaseline(baseline));
    }
    Ok(100.0 * (baseline - error) / baseline)
}

/// Improvement clamped at zero, the form shown in result tables.
pub fn display_improvement(error: f64, baseline: f64) -> Result<f64, ScoringError> {
    improvement(error, baseline).map(|pct| pct.max(0.0))
}
