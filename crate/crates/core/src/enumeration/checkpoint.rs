//! Resumable campaign bookkeeping.
//!
//! A checkpoint file starts with a `# checkpoint <config>` header, followed
//! by one line per completed top-level subtree:
//!
//! ```text
//! subtree=[1,7,63] count=12 by_t=3:12
//! ```
//!
//! `subtree` and `count` are always present; any further `key=value` fields
//! belong to whoever aggregates per-subtree results.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("checkpoint i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("checkpoint line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("checkpoint was written for `{found}`, this run is `{expected}`")]
    ConfigMismatch { expected: String, found: String },
    #[error("checkpoint names subtree {0} which is not part of this search")]
    UnknownSubtree(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckpointEntry {
    pub subtree: String,
    pub count: u64,
    pub fields: Vec<(String, String)>,
}

impl CheckpointEntry {
    pub fn field(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn to_line(&self) -> String {
        let mut line = format!("subtree={} count={}", self.subtree, self.count);
        for (k, v) in &self.fields {
            line.push(' ');
            line.push_str(k);
            line.push('=');
            line.push_str(v);
        }
        line
    }

    pub fn parse_line(text: &str, line: usize) -> Result<Self, CheckpointError> {
        let malformed = |reason: &str| CheckpointError::Malformed {
            line,
            reason: reason.to_string(),
        };
        let mut tokens = text.split_whitespace();
        let subtree = tokens
            .next()
            .and_then(|t| t.strip_prefix("subtree="))
            .ok_or_else(|| malformed("expected `subtree=`"))?
            .to_string();
        let count = tokens
            .next()
            .and_then(|t| t.strip_prefix("count="))
            .ok_or_else(|| malformed("expected `count=`"))?
            .parse()
            .map_err(|_| malformed("count is not an integer"))?;
        let fields = tokens
            .map(|t| {
                t.split_once('=')
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .ok_or_else(|| malformed("expected `key=value`"))
            })
            .collect::<Result<_, _>>()?;
        Ok(CheckpointEntry {
            subtree,
            count,
            fields,
        })
    }
}

/// Per-subtree result that can be stored in and restored from a checkpoint.
pub trait SubtreeTally: Sized + Send {
    fn count(&self) -> u64;
    fn to_fields(&self) -> Vec<(String, String)>;
    fn from_entry(entry: &CheckpointEntry) -> Result<Self, String>;
}

impl SubtreeTally for u64 {
    fn count(&self) -> u64 {
        *self
    }

    fn to_fields(&self) -> Vec<(String, String)> {
        Vec::new()
    }

    fn from_entry(entry: &CheckpointEntry) -> Result<Self, String> {
        Ok(entry.count)
    }
}

/// Open checkpoint: the entries already on disk plus an append handle.
pub struct CheckpointLog {
    done: HashMap<String, CheckpointEntry>,
    file: File,
}

impl CheckpointLog {
    /// Opens or creates `path`. An existing file must carry the same config
    /// header.
    pub fn open(path: &Path, config: &str) -> Result<Self, CheckpointError> {
        let header = format!("# checkpoint {config}");
        let mut done = HashMap::new();
        let mut fresh = true;
        if path.exists() {
            let reader = BufReader::new(File::open(path)?);
            for (idx, line) in reader.lines().enumerate() {
                let line = line?;
                let trimmed = line.trim();
                if trimmed.is_empty() {
                    continue;
                }
                if fresh {
                    if trimmed != header {
                        return Err(CheckpointError::ConfigMismatch {
                            expected: config.to_string(),
                            found: trimmed
                                .strip_prefix("# checkpoint ")
                                .unwrap_or(trimmed)
                                .to_string(),
                        });
                    }
                    fresh = false;
                    continue;
                }
                if trimmed.starts_with('#') {
                    continue;
                }
                let entry = CheckpointEntry::parse_line(trimmed, idx + 1)?;
                done.insert(entry.subtree.clone(), entry);
            }
        }
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        if fresh {
            writeln!(file, "{header}")?;
            file.flush()?;
        }
        Ok(CheckpointLog { done, file })
    }

    pub fn completed(&self, subtree: &str) -> Option<&CheckpointEntry> {
        self.done.get(subtree)
    }

    pub fn completed_labels(&self) -> impl Iterator<Item = &str> {
        self.done.keys().map(String::as_str)
    }

    pub fn record(&mut self, entry: &CheckpointEntry) -> Result<(), CheckpointError> {
        writeln!(self.file, "{}", entry.to_line())?;
        self.file.flush()?;
        self.file.sync_data()?;
        Ok(())
    }
}
