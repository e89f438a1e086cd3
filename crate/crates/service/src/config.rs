use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ENV_PORT: &str = "ECHO_PORT";
pub const ENV_STORE: &str = "ECHO_STORE";
pub const ENV_SCRIPTS: &str = "ECHO_SCRIPTS";
pub const ENV_ALPHA: &str = "ECHO_ALPHA";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed config {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid {name}={value:?}: {reason}")]
    Env {
        name: &'static str,
        value: String,
        reason: String,
    },
    #[error("port must be in 1..=65535, got {0}")]
    Port(u32),
    #[error("alpha must lie strictly between 0 and 1, got {0}")]
    Alpha(f64),
    #[error("session_ttl_hours must be positive, got {0}")]
    Ttl(i64),
    #[error("{what} not found: {path}")]
    MissingPath { what: &'static str, path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ServiceConfig {
    pub host: String,
    /// Wider than u16 so out-of-range values are reported, not wrapped.
    pub port: u32,
    pub store: PathBuf,
    /// Directory of script JSON files; the bundled example script when unset.
    pub scripts: Option<PathBuf>,
    pub session_ttl_hours: i64,
    pub alpha: f64,
    pub lexicon: Option<PathBuf>,
    pub vocabulary: Option<PathBuf>,
    pub codebook: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        Self {
            host: "127.0.0.1".into(),
            port: 8080,
            store: PathBuf::from("sessions.ndjson"),
            scripts: None,
            session_ttl_hours: inquiry_core::session::DEFAULT_TTL_HOURS,
            alpha: inquiry_core::analytics::DEFAULT_ALPHA,
            lexicon: None,
            vocabulary: None,
            codebook: None,
        }
    }
}

impl ServiceConfig {
    /// Reads the optional JSON file, then applies environment overrides
    /// through `env` (normally `std::env::var`).
    pub fn load(
        file: Option<&Path>,
        env: impl Fn(&str) -> Option<String>,
    ) -> Result<Self, ConfigError> {
        let mut cfg = match file {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
                    path: path.to_path_buf(),
                    source,
                })?;
                serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
                    path: path.to_path_buf(),
                    source,
                })?
            }
            None => ServiceConfig::default(),
        };
        if let Some(v) = env(ENV_PORT) {
            cfg.port = v.trim().parse().map_err(|e: std::num::ParseIntError| ConfigError::Env {
                name: ENV_PORT,
                value: v.clone(),
                reason: e.to_string(),
            })?;
        }
        if let Some(v) = env(ENV_STORE) {
            cfg.store = PathBuf::from(v);
        }
        if let Some(v) = env(ENV_SCRIPTS) {
            cfg.scripts = Some(PathBuf::from(v));
        }
        if let Some(v) = env(ENV_ALPHA) {
            cfg.alpha = v.trim().parse().map_err(|e: std::num::ParseFloatError| ConfigError::Env {
                name: ENV_ALPHA,
                value: v.clone(),
                reason: e.to_string(),
            })?;
        }
        Ok(cfg)
    }

    pub fn from_env(file: Option<&Path>) -> Result<Self, ConfigError> {
        Self::load(file, |k| std::env::var(k).ok())
    }

    /// Range and existence checks run before the server starts.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(1..=65535).contains(&self.port) {
            return Err(ConfigError::Port(self.port));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ConfigError::Alpha(self.alpha));
        }
        if self.session_ttl_hours <= 0 {
            return Err(ConfigError::Ttl(self.session_ttl_hours));
        }
        let must_exist = [
            ("script directory", self.scripts.as_ref()),
            ("lexicon", self.lexicon.as_ref()),
            ("vocabulary", self.vocabulary.as_ref()),
            ("codebook", self.codebook.as_ref()),
        ];
        for (what, path) in must_exist {
            if let Some(p) = path {
                if !p.exists() {
                    return Err(ConfigError::MissingPath {
                        what,
                        path: p.clone(),
                    });
                }
            }
        }
        if let Some(parent) = self.store.parent().filter(|p| !p.as_os_str().is_empty()) {
            if !parent.is_dir() {
                return Err(ConfigError::MissingPath {
                    what: "store directory",
                    path: parent.to_path_buf(),
                });
            }
        }
        Ok(())
    }

    pub fn port_u16(&self) -> u16 {
        u16::try_from(self.port).expect("validated port")
    }
}
