//! Deterministic kinematic execution of pick-and-place scripts.
//!
//! A script is applied to a task's initial scene one action at a time under
//! a fixed per-action time cost. Picks can be blocked by stacked objects or
//! fail stochastically; places are checked against the same validity rules
//! the generator uses, and anything still held at the end returns to where
//! it was lifted from. All randomness is drawn in a documented order from a
//! single seeded stream, so identical inputs always produce byte-identical
//! reports.

mod error;
mod execute;
mod report;
mod script;

pub use error::HarnessError;
pub use execute::{
    execute, replay_deterministic, ActionOutcome, ActionRecord, ExecutionConfig, ExecutionReport,
    NoiseConfig, Termination, HAZARD_MARGIN_CM,
};
pub use report::{read_report, report_from_json, report_to_json, write_report};
pub use script::{
    read_script, script_from_json, script_to_json, write_script, Action, ActionScript,
};
