//! HTTP service, configuration and operator CLI around `inquiry_core`.

pub mod api;
pub mod cli;
pub mod config;
pub mod error;

use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use inquiry_core::analytics::ReportOptions;
use inquiry_core::coding::{Codebook, CodebookError};
use inquiry_core::quantify::{Analyzer, TableError};
use inquiry_core::script::{example_script, validate_json, ValidationReport};
use inquiry_core::session::{SessionError, SessionManager};
use inquiry_core::store::{Store, StoreError};
use inquiry_core::InquiryScript;

pub use api::{router, AppState};
pub use config::ServiceConfig;

#[derive(Debug, Error)]
pub enum BootError {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid script {path}:\n{report}")]
    InvalidScript { path: String, report: ValidationReport },
    #[error("duplicate script id {0}")]
    DuplicateScript(String),
    #[error("no scripts found in {0}")]
    NoScripts(String),
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Codebook(#[from] CodebookError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Session(#[from] SessionError),
}

/// Reads and validates one script file.
pub fn load_script(path: &Path) -> Result<InquiryScript, BootError> {
    let text = std::fs::read_to_string(path).map_err(|source| BootError::Read {
        path: path.display().to_string(),
        source,
    })?;
    match validate_json(&text) {
        (Some(script), report) if report.is_clean() => Ok(script),
        (_, report) => Err(BootError::InvalidScript {
            path: path.display().to_string(),
            report,
        }),
    }
}

/// Every `*.json` file in a directory, in file-name order. Any invalid
/// script fails the whole load.
pub fn load_scripts(dir: &Path) -> Result<Vec<InquiryScript>, BootError> {
    let read_err = |source| BootError::Read {
        path: dir.display().to_string(),
        source,
    };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(read_err)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut scripts: Vec<InquiryScript> = Vec::new();
    for p in paths {
        let s = load_script(&p)?;
        if scripts.iter().any(|x| x.script_id == s.script_id) {
            return Err(BootError::DuplicateScript(s.script_id));
        }
        scripts.push(s);
    }
    if scripts.is_empty() {
        return Err(BootError::NoScripts(dir.display().to_string()));
    }
    Ok(scripts)
}

pub fn load_analyzer(cfg: &ServiceConfig) -> Result<Analyzer, BootError> {
    let mut analyzer = Analyzer::bundled();
    if let Some(p) = &cfg.lexicon {
        analyzer.sentiment = inquiry_core::quantify::SentimentLexicon::load(p)?;
    }
    if let Some(p) = &cfg.vocabulary {
        analyzer.vocabulary = inquiry_core::quantify::FrequencyVocabulary::load(p)?;
    }
    Ok(analyzer)
}

pub fn load_codebook(path: Option<&Path>) -> Result<Codebook, BootError> {
    Ok(match path {
        Some(p) => Codebook::load(p)?,
        None => Codebook::bundled(),
    })
}

/// Builds the application state from a validated configuration: scripts,
/// analyzer, codebook and the store with its restored sessions.
pub fn build_state(cfg: &ServiceConfig) -> Result<AppState, BootError> {
    cfg.validate()?;
    let scripts = match &cfg.scripts {
        Some(dir) => load_scripts(dir)?,
        None => vec![example_script()],
    };
    let store = Arc::new(Store::open(&cfg.store)?);
    let manager = SessionManager::new(scripts)
        .with_analyzer(Arc::new(load_analyzer(cfg)?))
        .with_ttl(chrono::Duration::hours(cfg.session_ttl_hours))
        .with_store(store)?;
    Ok(AppState {
        manager: Arc::new(manager),
        report_options: Arc::new(ReportOptions {
            alpha: cfg.alpha,
            codebook: load_codebook(cfg.codebook.as_deref())?,
        }),
    })
}
