//! Optional JSON overrides shared by the subcommands; command-line flags
//! take precedence over these, which take precedence over the defaults.

use std::fs;
use std::path::Path;

use anyhow::Context as _;
use serde::Deserialize;
use tablebench_scenegen::files::WorkspaceDto;
use tablebench_scenegen::{GenerationConfig, Workspace};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub workspace: Option<WorkspaceDto>,
    pub max_rejections: Option<u32>,
    pub clearance_tol: Option<f64>,
    pub support_tol: Option<f64>,
    pub time_limit_s: Option<f64>,
    pub per_action_cost_s: Option<f64>,
    pub grasp_fail_prob: Option<f64>,
    pub place_jitter_sigma_cm: Option<f64>,
    pub noise_seed: Option<u64>,
}

pub fn load(path: Option<&Path>) -> anyhow::Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text =
        fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
}

/// An 80 x 60 cm bench with 60 cm of clearance, unless overridden.
pub fn workspace(config: &FileConfig) -> anyhow::Result<Workspace> {
    match &config.workspace {
        Some(dto) => Ok(dto.to_workspace()?),
        None => Ok(Workspace::new(0.0, 80.0, 0.0, 60.0, 0.0, 60.0).expect("default workspace")),
    }
}

pub fn generation(config: &FileConfig, seed: u64) -> GenerationConfig {
    let mut gen = GenerationConfig {
        seed,
        ..GenerationConfig::default()
    };
    if let Some(v) = config.max_rejections {
        gen.max_rejections = v;
    }
    if let Some(v) = config.clearance_tol {
        gen.clearance_tol = v;
    }
    if let Some(v) = config.support_tol {
        gen.support_tol = v;
    }
    gen
}
