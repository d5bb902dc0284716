use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::Context as _;
use clap::Args;
use serde::Deserialize;
use tablebench_core::files::read_task;
use tablebench_core::SetTag;
use tablebench_service::{AppState, ContestConfig, ContestEngine, TaskSet, BIND_ENV};

use crate::{Context, EXIT_OK};

#[derive(Args)]
pub struct ServeArgs {
    /// Contest file to create (or reopen) before serving.
    #[arg(long)]
    contest: Option<PathBuf>,
    /// Bind address (default: $BENCH_BIND, else 127.0.0.1:8080).
    #[arg(long)]
    bind: Option<String>,
}

/// On-disk description of a new contest: its config plus a directory of
/// generated task files, split into trial and contest sets by their tags.
#[derive(Deserialize)]
struct ContestFile {
    config: ContestConfig,
    tasks_dir: PathBuf,
}

fn load_task_set(dir: &Path) -> anyhow::Result<TaskSet> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|ext| ext == "json")
                && p.file_name().is_some_and(|name| name != "manifest.json")
        })
        .collect();
    paths.sort();
    let mut set = TaskSet {
        trial: Vec::new(),
        contest: Vec::new(),
    };
    for path in paths {
        let task = read_task(&path).with_context(|| format!("reading {}", path.display()))?;
        match task.set_tag {
            SetTag::Trial => set.trial.push(task),
            SetTag::Contest => set.contest.push(task),
        }
    }
    Ok(set)
}

pub fn run(ctx: &Context, args: ServeArgs) -> anyhow::Result<u8> {
    fs::create_dir_all(&ctx.data_dir)
        .with_context(|| format!("creating {}", ctx.data_dir.display()))?;
    let state = AppState::load(&ctx.data_dir)?;
    if let Some(path) = &args.contest {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let file: ContestFile =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        let contest_id = file.config.contest_id.clone();
        if ContestEngine::exists(&ctx.data_dir, &contest_id) {
            ctx.note(format!(
                "contest '{contest_id}' already exists; serving the stored copy"
            ));
        } else {
            let tasks_dir = if file.tasks_dir.is_absolute() {
                file.tasks_dir.clone()
            } else {
                path.parent()
                    .unwrap_or(Path::new("."))
                    .join(&file.tasks_dir)
            };
            let tasks = load_task_set(&tasks_dir)?;
            state.insert(ContestEngine::create(&ctx.data_dir, file.config, tasks)?);
            ctx.note(format!("created contest '{contest_id}'"));
        }
    }
    let bind = args
        .bind
        .or_else(|| std::env::var(BIND_ENV).ok())
        .unwrap_or_else(|| "127.0.0.1:8080".to_string());
    let contests = state.contest_ids();
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(&bind)
            .await
            .with_context(|| format!("binding {bind}"))?;
        ctx.note(format!(
            "serving {} contest(s) {:?} on http://{}",
            contests.len(),
            contests,
            listener.local_addr()?
        ));
        tablebench_service::serve(Arc::new(state), listener).await?;
        Ok::<_, anyhow::Error>(())
    })?;
    Ok(EXIT_OK)
}
