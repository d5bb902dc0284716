//! Command-line front end: task generation, script execution, scoring,
//! ranking, scene validation, and the contest service.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod config;
mod gen_tasks;
mod rank_cmd;
mod run_cmd;
mod score_cmd;
mod serve_cmd;
mod validate_cmd;

pub(crate) const EXIT_OK: u8 = 0;
pub(crate) const EXIT_FAILURE: u8 = 1;
pub(crate) const EXIT_EXHAUSTED: u8 = 2;
pub(crate) const EXIT_HAZARD: u8 = 3;

/// Tabletop rearrangement benchmark tools.
#[derive(Parser)]
#[command(name = "tablebench", version, disable_help_subcommand = true)]
struct Cli {
    /// JSON file overriding workspace, generation, and execution defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Contest data directory (default: $BENCH_DATA_DIR, else ./data).
    #[arg(long, global = true)]
    data_dir: Option<PathBuf>,
    /// Suppress progress notes; results and errors still print.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate tasks from scene-graph templates.
    GenTasks(gen_tasks::GenTasksArgs),
    /// Score a solution or execution report against a task.
    Score(score_cmd::ScoreArgs),
    /// Execute an action script against a task.
    Run(run_cmd::RunArgs),
    /// Rank team score reports into a leaderboard.
    Rank(rank_cmd::RankArgs),
    /// Serve the contest API over HTTP.
    Serve(serve_cmd::ServeArgs),
    /// Check a task file's scenes for geometric validity.
    ValidateTask(validate_cmd::ValidateArgs),
}

/// Settings shared by every subcommand.
pub(crate) struct Context {
    pub config: config::FileConfig,
    pub data_dir: PathBuf,
    pub quiet: bool,
}

impl Context {
    /// Progress chatter, silenced by --quiet.
    pub fn note(&self, message: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", message.as_ref());
        }
    }
}

fn resolve_data_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(tablebench_service::DATA_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("data"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() {
                EXIT_FAILURE
            } else {
                EXIT_OK
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let file_config = match config::load(cli.config.as_deref()) {
        Ok(config) => config,
        Err(err) => {
            eprintln!("error: {err:#}");
            return ExitCode::from(EXIT_FAILURE);
        }
    };
    let ctx = Context {
        config: file_config,
        data_dir: resolve_data_dir(cli.data_dir),
        quiet: cli.quiet,
    };
    let result = match cli.command {
        Command::GenTasks(args) => gen_tasks::run(&ctx, args),
        Command::Score(args) => score_cmd::run(&ctx, args),
        Command::Run(args) => run_cmd::run(&ctx, args),
        Command::Rank(args) => rank_cmd::run(&ctx, args),
        Command::Serve(args) => serve_cmd::run(&ctx, args),
        Command::ValidateTask(args) => validate_cmd::run(&ctx, args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
