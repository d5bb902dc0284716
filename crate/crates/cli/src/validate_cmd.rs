use std::path::PathBuf;

use anyhow::Context as _;
use clap::Args;
use tablebench_core::files::read_task;
use tablebench_scenegen::validate_scene;

use crate::{config, Context, EXIT_FAILURE, EXIT_OK};

#[derive(Args)]
pub struct ValidateArgs {
    /// Task file whose scenes are checked.
    #[arg(long)]
    task: PathBuf,
}

pub fn run(ctx: &Context, args: ValidateArgs) -> anyhow::Result<u8> {
    let task = read_task(&args.task).with_context(|| format!("reading {}", args.task.display()))?;
    let workspace = config::workspace(&ctx.config)?;
    let gen_cfg = config::generation(&ctx.config, 0);
    let mut clean = true;
    for (name, scene) in [("initial", &task.initial), ("target", &task.target)] {
        let outcome = validate_scene(scene, &task.objects, &workspace, &gen_cfg)?;
        if outcome.violations.is_empty() {
            ctx.note(format!("{name}: valid"));
        } else {
            clean = false;
            for violation in &outcome.violations {
                println!("{name}: {violation}");
            }
        }
    }
    Ok(if clean { EXIT_OK } else { EXIT_FAILURE })
}
