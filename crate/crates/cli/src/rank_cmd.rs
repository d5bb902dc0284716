use std::fs;
use std::path::PathBuf;

use anyhow::Context as _;
use clap::Args;
use tablebench_scoring::{
    format_error_cm, format_grasp_rate, format_percent, grasp_success_rate, improvement,
    leaderboard_csv, rank, read_report, TeamResult,
};

use crate::{Context, EXIT_OK};

#[derive(Args)]
pub struct RankArgs {
    /// Team score report; repeat once per team.
    #[arg(long = "report", required = true)]
    reports: Vec<PathBuf>,
    /// Baseline task error in cm that improvements are relative to.
    #[arg(long)]
    baseline_cm: f64,
    /// Also write the leaderboard as CSV.
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

pub fn run(_ctx: &Context, args: RankArgs) -> anyhow::Result<u8> {
    let mut results = Vec::new();
    for path in &args.reports {
        let report = read_report(path).with_context(|| format!("reading {}", path.display()))?;
        results.push(TeamResult {
            team_id: report.team_id.clone(),
            final_error: report.average_error,
            improvement_pct: improvement(report.average_error, args.baseline_cm)?,
            total_execution_time_s: report.total_execution_time_s,
            grasp: report.grasp,
        });
    }
    let entries = rank(results);
    println!(
        "{:<5} {:<20} {:>9} {:>12} {:>9} {:>7} qualified",
        "rank", "team", "error_cm", "improvement", "time_s", "grasp"
    );
    for entry in &entries {
        println!(
            "{:<5} {:<20} {:>9} {:>11}% {:>9.1} {:>7} {}",
            entry.rank,
            entry.team_id,
            format_error_cm(entry.final_error),
            format_percent(entry.improvement_pct),
            entry.total_execution_time_s,
            format_grasp_rate(grasp_success_rate(entry.grasp)?),
            if entry.qualified { "yes" } else { "no" }
        );
    }
    println!("baseline {} cm", format_error_cm(args.baseline_cm));
    if let Some(path) = &args.out_csv {
        let csv = leaderboard_csv(&entries, Some(args.baseline_cm))?;
        fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(EXIT_OK)
}
