//! Append-only NDJSON session store.
//!
//! Every change to a session appends its full state as one line; the latest
//! line for a session id wins. An interrupted append can leave one truncated
//! final line, which is cut off when the store is reopened and skipped when
//! read.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use thiserror::Error;

use crate::session::SessionState;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("store not found: {0}")]
    NotFound(PathBuf),
    #[error("store i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("corrupt store record at {path}:{line}: {message}")]
    Corrupt {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Loaded {
    /// Latest state per session, ordered by session id.
    pub sessions: Vec<SessionState>,
    /// Whether a truncated final line was skipped.
    pub truncated_tail: bool,
}

/// Parses store contents. Only the final line may be malformed, and only if
/// it lacks its newline.
pub fn parse_records(content: &str, path: &Path) -> Result<Loaded, StoreError> {
    let mut latest: BTreeMap<String, SessionState> = BTreeMap::new();
    let mut truncated_tail = false;
    let ends_clean = content.is_empty() || content.ends_with('\n');
    let lines: Vec<&str> = content.split_terminator('\n').collect();
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<SessionState>(line) {
            Ok(s) => {
                latest.insert(s.session_id.clone(), s);
            }
            Err(e) if i + 1 == lines.len() && !ends_clean => {
                tracing::warn!(path = %path.display(), line = i + 1, error = %e, "skipping truncated final store record");
                truncated_tail = true;
            }
            Err(e) => {
                return Err(StoreError::Corrupt {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(Loaded {
        sessions: latest.into_values().collect(),
        truncated_tail,
    })
}

/// Reads a store file without opening it for writing.
pub fn load(path: &Path) -> Result<Loaded, StoreError> {
    if !path.exists() {
        return Err(StoreError::NotFound(path.to_path_buf()));
    }
    let content = std::fs::read_to_string(path).map_err(|source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_records(&content, path)
}

/// Rewrites the store with one line per session, ordered by id. Writes a
/// sibling temp file and renames it over the original.
pub fn compact(path: &Path) -> Result<usize, StoreError> {
    let loaded = load(path)?;
    let io_err = |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    };
    let tmp = path.with_extension("compact.tmp");
    {
        let mut f = File::create(&tmp).map_err(io_err)?;
        for s in &loaded.sessions {
            let line = serde_json::to_string(s).expect("states always serialize");
            f.write_all(line.as_bytes()).map_err(io_err)?;
            f.write_all(b"\n").map_err(io_err)?;
        }
        f.sync_all().map_err(io_err)?;
    }
    std::fs::rename(&tmp, path).map_err(io_err)?;
    Ok(loaded.sessions.len())
}

/// Single writer for a store file.
#[derive(Debug)]
pub struct Store {
    path: PathBuf,
    writer: Mutex<File>,
}

impl Store {
    /// Opens or creates the store, cutting off a truncated final line.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let path = path.into();
        let io_err = |source| StoreError::Io {
            path: path.clone(),
            source,
        };
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            std::fs::create_dir_all(parent).map_err(io_err)?;
        }
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(&path)
            .map_err(io_err)?;
        let mut content = Vec::new();
        file.read_to_end(&mut content).map_err(io_err)?;
        if !content.is_empty() && !content.ends_with(b"\n") {
            let keep = content.iter().rposition(|b| *b == b'\n').map_or(0, |i| i + 1);
            tracing::warn!(
                path = %path.display(),
                dropped_bytes = content.len() - keep,
                "removing truncated final store record"
            );
            file.set_len(keep as u64).map_err(io_err)?;
            file.seek(SeekFrom::End(0)).map_err(io_err)?;
        }
        Ok(Self {
            path,
            writer: Mutex::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, state: &SessionState) -> Result<(), StoreError> {
        let mut line = serde_json::to_string(state).expect("states always serialize");
        line.push('\n');
        let mut f = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        f.write_all(line.as_bytes())
            .and_then(|_| f.flush())
            .map_err(|source| StoreError::Io {
                path: self.path.clone(),
                source,
            })
    }

    pub fn load(&self) -> Result<Loaded, StoreError> {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        load(&self.path)
    }
}
