//! Loader for the `term<TAB>value` table format shared by the sentiment
//! lexicon and the frequency vocabulary.

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// One `term<TAB>value` row with its 1-based line number.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub line: usize,
    pub term: String,
    pub value: String,
}

/// Parses a table. Blank lines and lines starting with `#` are ignored; terms
/// are lowercased and inner whitespace is collapsed.
pub fn parse_table(content: &str) -> Result<Vec<Row>, TableError> {
    let mut rows = Vec::new();
    for (idx, raw) in content.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (term, value) = raw.split_once('\t').ok_or_else(|| TableError::Syntax {
            line,
            message: "expected term<TAB>value".into(),
        })?;
        let term = term
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ")
            .to_lowercase();
        if term.is_empty() {
            return Err(TableError::Syntax {
                line,
                message: "empty term".into(),
            });
        }
        rows.push(Row {
            line,
            term,
            value: value.trim().to_string(),
        });
    }
    Ok(rows)
}

pub fn read_table(path: &Path) -> Result<Vec<Row>, TableError> {
    let content = std::fs::read_to_string(path).map_err(|source| TableError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_table(&content)
}

/// Parses a decimal or a simple `a/b` quotient.
pub fn parse_number(s: &str) -> Option<f64> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().ok()?;
            let b: f64 = b.trim().parse().ok()?;
            if b == 0.0 {
                return None;
            }
            a / b
        }
        None => s.parse().ok()?,
    };
    v.is_finite().then_some(v)
}
