use std::fs;
use std::path::PathBuf;

use anyhow::Context as _;
use clap::{Args, ValueEnum};
use tablebench_core::files::{read_scene_config, read_task};
use tablebench_core::SceneConfiguration;
use tablebench_harness::read_report;
use tablebench_scoring::{
    baseline_error, display_improvement, evaluate_task, format_error_cm, format_percent,
    write_report, GraspStats, MissingObjectMode, RunScore, ScoreReport, UebPolicy,
};

use crate::{Context, EXIT_OK};

#[derive(Args)]
pub struct ScoreArgs {
    /// Task file; repeat to score a whole task set.
    #[arg(long = "task", required = true)]
    tasks: Vec<PathBuf>,
    /// Scene-configuration file with the solver's final poses, one per task.
    #[arg(long = "solution")]
    solutions: Vec<PathBuf>,
    /// Execution report scored instead of a raw scene, one per task.
    #[arg(long = "report")]
    reports: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = PolicyArg::SizeBased)]
    policy: PolicyArg,
    /// Fixed upper error bound in cm (constant policy only).
    #[arg(long)]
    ueb_cm: Option<f64>,
    /// Also print the baseline error and the improvement over it.
    #[arg(long)]
    baseline: bool,
    /// Fail instead of bounding objects the solution leaves unplaced.
    #[arg(long)]
    strict: bool,
    /// Team id; makes --out write a team score report covering every task.
    #[arg(long)]
    team: Option<String>,
    /// Where to write the score as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum PolicyArg {
    /// Bound each object by five times its mean bounding-box dimension.
    SizeBased,
    /// Bound every object by --ueb-cm.
    Constant,
}

fn policy_of(args: &ScoreArgs) -> anyhow::Result<UebPolicy> {
    match args.policy {
        PolicyArg::SizeBased => {
            anyhow::ensure!(
                args.ueb_cm.is_none(),
                "--ueb-cm only applies to --policy constant"
            );
            Ok(UebPolicy::SizeBased2020)
        }
        PolicyArg::Constant => {
            let value = args.ueb_cm.context("--policy constant needs --ueb-cm")?;
            Ok(UebPolicy::constant(value)?)
        }
    }
}

/// One solved scene with, for executed scripts, its cost and grasp counts.
struct Solved {
    config: SceneConfiguration,
    elapsed_s: f64,
    grasp: GraspStats,
}

fn load_solved(args: &ScoreArgs) -> anyhow::Result<Vec<Solved>> {
    anyhow::ensure!(
        args.solutions.is_empty() != args.reports.is_empty(),
        "provide --solution files or --report files, not both"
    );
    let paths = if args.solutions.is_empty() {
        &args.reports
    } else {
        &args.solutions
    };
    anyhow::ensure!(
        paths.len() == args.tasks.len(),
        "{} task(s) but {} solution/report file(s)",
        args.tasks.len(),
        paths.len()
    );
    paths
        .iter()
        .map(|path| {
            if args.solutions.is_empty() {
                let report =
                    read_report(path).with_context(|| format!("reading {}", path.display()))?;
                Ok(Solved {
                    config: report.final_config,
                    elapsed_s: report.elapsed_s,
                    grasp: GraspStats {
                        successes: report.grasp_successes,
                        attempts: report.grasp_attempts,
                    },
                })
            } else {
                let config = read_scene_config(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok(Solved {
                    config,
                    elapsed_s: 0.0,
                    grasp: GraspStats {
                        successes: 0,
                        attempts: 0,
                    },
                })
            }
        })
        .collect()
}

pub fn run(_ctx: &Context, args: ScoreArgs) -> anyhow::Result<u8> {
    let policy = policy_of(&args)?;
    if args.team.is_none() && args.tasks.len() > 1 && args.out.is_some() {
        anyhow::bail!("--out over several tasks needs --team to name the report");
    }
    let solved = load_solved(&args)?;
    let mode = if args.strict {
        MissingObjectMode::Strict
    } else {
        MissingObjectMode::Lenient
    };
    let multi = args.tasks.len() > 1;
    let mut task_scores = Vec::new();
    let mut baseline_sum = 0.0;
    let mut total_elapsed = 0.0;
    let mut grasp = GraspStats {
        successes: 0,
        attempts: 0,
    };
    for (path, solved) in args.tasks.iter().zip(&solved) {
        let task = read_task(path).with_context(|| format!("reading {}", path.display()))?;
        let score = evaluate_task(&task, &solved.config, &policy, mode)?;
        if multi {
            println!("task {}:", task.task_id);
        }
        for (id, error) in &score.per_object_error {
            println!("{id}: {} cm", format_error_cm(*error));
        }
        println!(
            "E = {} cm over {} object(s), {} capped",
            format_error_cm(score.task_error),
            score.per_object_error.len(),
            score.capped_count
        );
        baseline_sum += baseline_error(&task, &policy);
        total_elapsed += solved.elapsed_s;
        grasp.successes += solved.grasp.successes;
        grasp.attempts += solved.grasp.attempts;
        task_scores.push(score);
    }
    let run = RunScore::new("cli", task_scores, total_elapsed)?;
    if multi {
        println!(
            "average E = {} cm over {} task(s), elapsed {:.1} s",
            format_error_cm(run.average_error),
            run.task_scores.len(),
            run.total_execution_time_s
        );
    } else if run.total_execution_time_s > 0.0 {
        println!("elapsed {:.1} s", run.total_execution_time_s);
    }
    if args.baseline {
        let baseline = baseline_sum / run.task_scores.len() as f64;
        let improvement = display_improvement(run.average_error, baseline)?;
        println!(
            "baseline {} cm, improvement {}%",
            format_error_cm(baseline),
            format_percent(improvement)
        );
    }
    if let Some(path) = &args.out {
        if let Some(team) = &args.team {
            let report = ScoreReport::from_run(team, policy, &run, grasp);
            write_report(path, &report)?;
        } else {
            let mut text = serde_json::to_string_pretty(&run.task_scores[0])?;
            text.push('\n');
            fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    Ok(EXIT_OK)
}
