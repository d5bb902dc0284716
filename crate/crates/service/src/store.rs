//! Durable contest storage: an append-only event log plus a snapshot file.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::ServiceError;
use crate::types::{Stage, SubmissionRecord, SubmissionStatus};

/// One durable state change. A contest's history is the ordered list of
/// these, one JSON document per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Submission {
        record: SubmissionRecord,
    },
    Status {
        submission_id: String,
        status: SubmissionStatus,
    },
    StageChanged {
        stage: Stage,
    },
}

/// File layout for one contest: `contest.json` (static setup), `log.jsonl`
/// (events), `snapshot.json` (latest leaderboard, a convenience copy).
pub struct ContestStore {
    dir: PathBuf,
}

impl ContestStore {
    pub fn new(dir: PathBuf) -> Self {
        ContestStore { dir }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn contest_path(&self) -> PathBuf {
        self.dir.join("contest.json")
    }

    pub fn log_path(&self) -> PathBuf {
        self.dir.join("log.jsonl")
    }

    pub fn snapshot_path(&self) -> PathBuf {
        self.dir.join("snapshot.json")
    }

    /// Appends one event and syncs it to disk before returning, so an
    /// acknowledged event survives a crash.
    pub fn append(&self, event: &Event) -> Result<(), ServiceError> {
        let mut line = serde_json::to_string(event)?;
        line.push('\n');
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(self.log_path())?;
        file.write_all(line.as_bytes())?;
        file.sync_data()?;
        Ok(())
    }

    /// Reads the log back, tolerating a torn final line (a crash in the
    /// middle of an append). The torn tail is truncated away so later
    /// appends start on a clean boundary; corruption anywhere else is an
    /// error.
    pub fn recover(&self) -> Result<Vec<Event>, ServiceError> {
        let path = self.log_path();
        if !path.exists() {
            return Ok(Vec::new());
        }
        let text = fs::read_to_string(&path)?;
        let mut events = Vec::new();
        let mut valid_len = 0usize;
        let mut segments = text.split_inclusive('\n').peekable();
        let mut line_no = 0usize;
        while let Some(segment) = segments.next() {
            line_no += 1;
            let line = segment.trim_end_matches('\n');
            if line.trim().is_empty() {
                valid_len += segment.len();
                continue;
            }
            match serde_json::from_str::<Event>(line) {
                Ok(event) => {
                    events.push(event);
                    valid_len += segment.len();
                }
                Err(err) => {
                    if segments.peek().is_none() {
                        let file = OpenOptions::new().write(true).open(&path)?;
                        file.set_len(valid_len as u64)?;
                        file.sync_data()?;
                        break;
                    }
                    return Err(ServiceError::CorruptStore(format!(
                        "{} line {line_no}: {err}",
                        path.display()
                    )));
                }
            }
        }
        Ok(events)
    }

    /// Atomically replaces the snapshot file.
    pub fn write_snapshot(&self, json: &str) -> Result<(), ServiceError> {
        let tmp = self.dir.join("snapshot.json.tmp");
        {
            let mut file = fs::File::create(&tmp)?;
            file.write_all(json.as_bytes())?;
            file.sync_data()?;
        }
        fs::rename(&tmp, self.snapshot_path())?;
        Ok(())
    }
}
