use std::fs;
use std::path::PathBuf;

use anyhow::Context as _;
use clap::Args;
use tablebench_core::files::{read_database, write_task};
use tablebench_core::SetTag;
use tablebench_scenegen::files::read_template;
use tablebench_scenegen::{generate_batch, manifest_to_json, BatchEntry, SceneGenError};

use crate::{config, Context, EXIT_EXHAUSTED, EXIT_OK};

#[derive(Args)]
pub struct GenTasksArgs {
    /// Template file; repeat for several task families.
    #[arg(long = "template", required = true)]
    templates: Vec<PathBuf>,
    /// Object database file.
    #[arg(long)]
    db: PathBuf,
    /// Output directory for task files and the manifest.
    #[arg(long)]
    out: PathBuf,
    /// Batch seed; per-task seeds derive from it.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Tasks to generate per template.
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Fraction of the batch tagged for the trial set.
    #[arg(long, default_value_t = 0.0)]
    trial_fraction: f64,
}

pub fn run(ctx: &Context, args: GenTasksArgs) -> anyhow::Result<u8> {
    let db = read_database(&args.db).with_context(|| format!("reading {}", args.db.display()))?;
    let entries = args
        .templates
        .iter()
        .map(|path| {
            let template =
                read_template(path).with_context(|| format!("reading {}", path.display()))?;
            Ok(BatchEntry {
                template,
                count: args.count,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let workspace = config::workspace(&ctx.config)?;
    let gen_cfg = config::generation(&ctx.config, args.seed);
    let tasks = match generate_batch(&entries, &db, &workspace, &gen_cfg, args.trial_fraction) {
        Ok(tasks) => tasks,
        Err(err @ SceneGenError::GenerationExhausted { .. }) => {
            eprintln!("error: {err}");
            return Ok(EXIT_EXHAUSTED);
        }
        Err(err) => return Err(err.into()),
    };
    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    for generated in &tasks {
        let path = args.out.join(format!("{}.json", generated.task.task_id));
        write_task(&path, &generated.task)?;
    }
    fs::write(args.out.join("manifest.json"), manifest_to_json(&tasks))?;
    let trial = tasks
        .iter()
        .filter(|t| t.task.set_tag == SetTag::Trial)
        .count();
    ctx.note(format!(
        "generated {} task(s) ({} trial, {} contest) in {}",
        tasks.len(),
        trial,
        tasks.len() - trial,
        args.out.display()
    ));
    Ok(EXIT_OK)
}
