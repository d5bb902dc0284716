use std::path::PathBuf;

use anyhow::Context as _;
use clap::Args;
use tablebench_core::files::read_task;
use tablebench_harness::{
    execute, read_script, write_report, ExecutionConfig, NoiseConfig, Termination,
};

use crate::{config, Context, EXIT_HAZARD, EXIT_OK};

#[derive(Args)]
pub struct RunArgs {
    /// Task file providing the world and the target.
    #[arg(long)]
    task: PathBuf,
    /// Action script to execute.
    #[arg(long)]
    script: PathBuf,
    /// Where to write the execution report.
    #[arg(long)]
    out: PathBuf,
    /// Wall budget in seconds (default 600).
    #[arg(long)]
    time_limit_s: Option<f64>,
    /// Charge per action in seconds (default 15).
    #[arg(long)]
    per_action_cost_s: Option<f64>,
    /// Probability that a grasp attempt fails.
    #[arg(long)]
    grasp_fail_prob: Option<f64>,
    /// Lateral placement noise, standard deviation in cm.
    #[arg(long)]
    jitter_sigma_cm: Option<f64>,
    /// Seed for the noise stream.
    #[arg(long)]
    noise_seed: Option<u64>,
}

pub fn run(ctx: &Context, args: RunArgs) -> anyhow::Result<u8> {
    let task = read_task(&args.task).with_context(|| format!("reading {}", args.task.display()))?;
    let script =
        read_script(&args.script).with_context(|| format!("reading {}", args.script.display()))?;
    let file = &ctx.config;
    let mut cfg = ExecutionConfig::new(config::workspace(file)?);
    if let Some(v) = file.clearance_tol {
        cfg.clearance_tol = v;
    }
    if let Some(v) = file.support_tol {
        cfg.support_tol = v;
    }
    if let Some(v) = args.time_limit_s.or(file.time_limit_s) {
        cfg.time_limit_s = v;
    }
    if let Some(v) = args.per_action_cost_s.or(file.per_action_cost_s) {
        cfg.per_action_cost_s = v;
    }
    let grasp_fail_prob = args.grasp_fail_prob.or(file.grasp_fail_prob);
    let place_jitter_sigma_cm = args.jitter_sigma_cm.or(file.place_jitter_sigma_cm);
    let noise_seed = args.noise_seed.or(file.noise_seed);
    if grasp_fail_prob.is_some() || place_jitter_sigma_cm.is_some() || noise_seed.is_some() {
        cfg.noise = Some(NoiseConfig {
            grasp_fail_prob: grasp_fail_prob.unwrap_or(0.0),
            place_jitter_sigma_cm: place_jitter_sigma_cm.unwrap_or(0.0),
            seed: noise_seed.unwrap_or(0),
        });
    }
    let report = execute(&task, &script, &cfg)?;
    write_report(&args.out, &report)?;
    ctx.note(format!(
        "terminated: {:?}, elapsed {:.1} s, grasps {}/{}, report in {}",
        report.terminated,
        report.elapsed_s,
        report.grasp_successes,
        report.grasp_attempts,
        args.out.display()
    ));
    if report.terminated == Termination::Hazard {
        eprintln!("hazard: an object was placed far outside the workspace");
        return Ok(EXIT_HAZARD);
    }
    Ok(EXIT_OK)
}
