//! Session state and its append-only JSONL log.

use crate::taskgen::{Answer, Category};
use crate::topology::Topology;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const LOG_FILE: &str = "rater_log.jsonl";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Correct,
    Incorrect,
    #[serde(alias = "idk")]
    IDontKnow,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaterSession {
    pub id: String,
    pub alias: String,
    pub seed: u64,
    /// Instances sampled per task per topology.
    pub plan: usize,
    pub tasks: Vec<String>,
    /// Instance ids in presentation order.
    pub slots: Vec<String>,
    /// Index of the next unanswered slot.
    #[serde(default)]
    pub cursor: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaterResponse {
    pub session_id: String,
    pub slot: usize,
    pub instance_id: String,
    pub task_id: String,
    pub category: Category,
    pub topology: Topology,
    pub verdict: Verdict,
    pub clarity_ok: bool,
    pub logic_ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub given_answer: Option<Answer>,
    /// Whether `given_answer` matched the ground truth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer_correct: Option<bool>,
    /// Client-measured time on the item.
    pub elapsed_s: f64,
    /// Server receipt time, milliseconds since the Unix epoch.
    pub received_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum LogEvent {
    Session(RaterSession),
    Response(RaterResponse),
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {source}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
    #[error("{0}")]
    Replay(String),
}

/// Sessions rebuilt from the log plus the handle used to extend it.
pub struct Store {
    path: PathBuf,
    file: File,
    pub sessions: HashMap<String, RaterSession>,
    pub responses: Vec<RaterResponse>,
}

/// Parse a log. A final line that does not parse is an interrupted write
/// and is ignored.
pub fn read_log(path: &Path) -> Result<Vec<LogEvent>, StoreError> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(source) => {
            return Err(StoreError::Io {
                path: path.to_path_buf(),
                source,
            })
        }
    };
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let mut events = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        match serde_json::from_str(line) {
            Ok(ev) => events.push(ev),
            Err(e) if i + 1 == lines.len() => {
                tracing::warn!(path = %path.display(), error = %e, "ignoring partial final log line");
            }
            Err(source) => {
                return Err(StoreError::Corrupt {
                    path: path.to_path_buf(),
                    line: i + 1,
                    source,
                })
            }
        }
    }
    Ok(events)
}

/// Rebuild session state from events.
pub fn replay(events: &[LogEvent]) -> Result<(HashMap<String, RaterSession>, Vec<RaterResponse>), StoreError> {
    let mut sessions: HashMap<String, RaterSession> = HashMap::new();
    let mut responses = Vec::new();
    for ev in events {
        match ev {
            LogEvent::Session(s) => {
                let mut s = s.clone();
                s.cursor = 0;
                sessions.insert(s.id.clone(), s);
            }
            LogEvent::Response(r) => {
                let s = sessions
                    .get_mut(&r.session_id)
                    .ok_or_else(|| StoreError::Replay(format!("response for unknown session {}", r.session_id)))?;
                if r.slot != s.cursor || s.slots.get(r.slot) != Some(&r.instance_id) {
                    return Err(StoreError::Replay(format!(
                        "response for slot {} of session {} is out of order",
                        r.slot, r.session_id
                    )));
                }
                s.cursor += 1;
                responses.push(r.clone());
            }
        }
    }
    Ok((sessions, responses))
}

impl Store {
    pub fn open(log_dir: &Path) -> Result<Store, StoreError> {
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| StoreError::Io { path, source }
        };
        std::fs::create_dir_all(log_dir).map_err(io(log_dir))?;
        let path = log_dir.join(LOG_FILE);
        let events = read_log(&path)?;
        let (sessions, responses) = replay(&events)?;
        let file = OpenOptions::new().create(true).append(true).open(&path).map_err(io(&path))?;
        // Cut an interrupted final write so new lines start clean.
        let bytes = std::fs::read(&path).map_err(io(&path))?;
        if !bytes.is_empty() && !bytes.ends_with(b"\n") {
            let keep = bytes.iter().rposition(|b| *b == b'\n').map_or(0, |i| i + 1);
            file.set_len(keep as u64).map_err(io(&path))?;
        }
        Ok(Store {
            path,
            file,
            sessions,
            responses,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Write one event and fsync before returning.
    pub fn append(&mut self, ev: &LogEvent) -> Result<(), StoreError> {
        let mut line = serde_json::to_string(ev).expect("log events serialize");
        line.push('\n');
        self.file
            .write_all(line.as_bytes())
            .and_then(|_| self.file.sync_data())
            .map_err(|source| StoreError::Io {
                path: self.path.clone(),
                source,
            })
    }
}
