use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quantify::phrase_lemma;
use crate::text::tokenize;

pub const DEFAULT_CODEBOOK_JSON: &str = include_str!("../../data/codebook.json");

#[derive(Debug, Error)]
pub enum CodebookError {
    #[error("cannot read codebook: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed codebook: {0}")]
    Json(#[from] serde_json::Error),
    #[error("trigger {lemma:?} appears in themes {first:?} and {second:?}; declare theme_priority")]
    OverlappingTriggers {
        lemma: String,
        first: String,
        second: String,
    },
    #[error("theme_priority names unknown theme {0:?}")]
    UnknownPriorityTheme(String),
    #[error("theme_priority must list every theme; missing {0:?}")]
    IncompletePriority(String),
    #[error("emotion bands must satisfy -1 <= negative_below <= positive_above <= 1")]
    BadEmotionBands,
    #[error("empty connective pattern")]
    EmptyConnective,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmotionBands {
    /// Scores strictly below this are negative.
    pub negative_below: f64,
    /// Scores strictly above this are positive.
    pub positive_above: f64,
}

impl Default for EmotionBands {
    fn default() -> Self {
        Self {
            negative_below: -0.25,
            positive_above: 0.25,
        }
    }
}

/// Which side of a connective holds the cause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// The connective introduces the cause: "anxious because of exams".
    CauseFirst,
    /// The connective introduces the effect: "smoking causes cancer".
    EffectFirst,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Connective {
    pub pattern: String,
    pub direction: Direction,
}

fn default_connectives() -> Vec<Connective> {
    let cause_first = [
        "because of",
        "because",
        "due to",
        "since",
        "as a result of",
        "caused by",
        "owing to",
    ];
    let effect_first = [
        "causes",
        "cause",
        "caused",
        "leads to",
        "lead to",
        "led to",
        "results in",
        "resulted in",
        "so",
        "therefore",
        "as a result",
        "→",
        "->",
    ];
    cause_first
        .iter()
        .map(|p| (p, Direction::CauseFirst))
        .chain(effect_first.iter().map(|p| (p, Direction::EffectFirst)))
        .map(|(p, direction)| Connective {
            pattern: p.to_string(),
            direction,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct RawCodebook {
    #[serde(default)]
    themes: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    theme_priority: Option<Vec<String>>,
    #[serde(default)]
    emotion_bands: EmotionBands,
    #[serde(default = "default_connectives")]
    connectives: Vec<Connective>,
}

/// Validated codebook. Theme triggers are stored lemmatized.
#[derive(Debug, Clone)]
pub struct Codebook {
    /// Themes in priority order, each with its trigger lemmas.
    pub themes: Vec<(String, BTreeSet<String>)>,
    pub emotion_bands: EmotionBands,
    pub connectives: Vec<Connective>,
    connective_re: Regex,
}

/// Lemma form of a trigger phrase, matching how entity lemmas are built.
pub fn trigger_lemma(trigger: &str) -> String {
    let tokens = tokenize(trigger);
    let refs: Vec<_> = tokens.iter().collect();
    phrase_lemma(&refs)
}

fn connective_regex(connectives: &[Connective]) -> Result<Regex, CodebookError> {
    let mut patterns: Vec<&str> = connectives.iter().map(|c| c.pattern.as_str()).collect();
    if patterns.iter().any(|p| p.trim().is_empty()) {
        return Err(CodebookError::EmptyConnective);
    }
    // longest first so "because of" wins over "because"
    patterns.sort_by(|a, b| b.chars().count().cmp(&a.chars().count()).then(a.cmp(b)));
    let alts: Vec<String> = patterns
        .iter()
        .map(|p| {
            let p = p.trim().to_lowercase();
            let mut s = regex::escape(&p).replace(' ', r"\s+");
            if p.starts_with(|c: char| c.is_alphanumeric()) {
                s = format!(r"\b{s}");
            }
            if p.ends_with(|c: char| c.is_alphanumeric()) {
                s = format!(r"{s}\b");
            }
            s
        })
        .collect();
    Ok(Regex::new(&format!("(?:{})", alts.join("|"))).expect("escaped patterns compile"))
}

impl Codebook {
    pub fn from_json(json: &str) -> Result<Self, CodebookError> {
        let raw: RawCodebook = serde_json::from_str(json)?;
        Self::build(raw)
    }

    pub fn load(path: &Path) -> Result<Self, CodebookError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn bundled() -> Self {
        Self::from_json(DEFAULT_CODEBOOK_JSON).expect("bundled codebook is valid")
    }

    /// A codebook with no themes and default bands and connectives.
    pub fn empty() -> Self {
        Self::build(RawCodebook {
            themes: BTreeMap::new(),
            theme_priority: None,
            emotion_bands: EmotionBands::default(),
            connectives: default_connectives(),
        })
        .expect("defaults are valid")
    }

    fn build(raw: RawCodebook) -> Result<Self, CodebookError> {
        let b = raw.emotion_bands;
        if !(b.negative_below >= -1.0 && b.negative_below <= b.positive_above && b.positive_above <= 1.0) {
            return Err(CodebookError::BadEmotionBands);
        }
        let order: Vec<String> = match &raw.theme_priority {
            Some(p) => {
                for t in p {
                    if !raw.themes.contains_key(t) {
                        return Err(CodebookError::UnknownPriorityTheme(t.clone()));
                    }
                }
                if let Some(missing) = raw.themes.keys().find(|t| !p.contains(t)) {
                    return Err(CodebookError::IncompletePriority(missing.clone()));
                }
                p.clone()
            }
            None => raw.themes.keys().cloned().collect(),
        };
        let themes: Vec<(String, BTreeSet<String>)> = order
            .into_iter()
            .map(|t| {
                let triggers = raw.themes[&t].iter().map(|w| trigger_lemma(w)).collect();
                (t, triggers)
            })
            .collect();
        if raw.theme_priority.is_none() {
            let mut owner: BTreeMap<&str, &str> = BTreeMap::new();
            for (theme, triggers) in &themes {
                for lemma in triggers {
                    if let Some(first) = owner.insert(lemma, theme) {
                        return Err(CodebookError::OverlappingTriggers {
                            lemma: lemma.clone(),
                            first: first.to_string(),
                            second: theme.clone(),
                        });
                    }
                }
            }
        }
        let connective_re = connective_regex(&raw.connectives)?;
        Ok(Self {
            themes,
            emotion_bands: raw.emotion_bands,
            connectives: raw.connectives,
            connective_re,
        })
    }

    /// The theme a lemma codes to: the first theme in priority order whose
    /// triggers contain it.
    pub fn theme_for(&self, lemma: &str) -> Option<&str> {
        self.themes
            .iter()
            .find(|(_, triggers)| triggers.contains(lemma))
            .map(|(t, _)| t.as_str())
    }

    pub(crate) fn connective_regex(&self) -> &Regex {
        &self.connective_re
    }

    pub(crate) fn direction_of(&self, matched_lower: &str) -> Option<Direction> {
        static WS: Lazy<Regex> = Lazy::new(|| Regex::new(r"\s+").unwrap());
        let norm = WS.replace_all(matched_lower, " ");
        self.connectives
            .iter()
            .find(|c| c.pattern.trim().to_lowercase() == norm)
            .map(|c| c.direction)
    }
}

impl Default for Codebook {
    fn default() -> Self {
        Self::bundled()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_is_valid() {
        let cb = Codebook::bundled();
        assert!(!cb.themes.is_empty());
        assert_eq!(cb.emotion_bands, EmotionBands::default());
    }

    #[test]
    fn overlap_needs_priority() {
        let json = r#"{"themes": {"a": ["exam"], "b": ["exams"]}}"#;
        assert!(matches!(
            Codebook::from_json(json),
            Err(CodebookError::OverlappingTriggers { .. })
        ));
        let json = r#"{"themes": {"a": ["exam"], "b": ["exams"]}, "theme_priority": ["b", "a"]}"#;
        let cb = Codebook::from_json(json).unwrap();
        assert_eq!(cb.theme_for("exam"), Some("b"));
    }

    #[test]
    fn bands_checked() {
        let json = r#"{"emotion_bands": {"negative_below": 0.5, "positive_above": 0.1}}"#;
        assert!(matches!(Codebook::from_json(json), Err(CodebookError::BadEmotionBands)));
    }

    #[test]
    fn triggers_lemmatized() {
        let cb = Codebook::from_json(r#"{"themes": {"w": ["Deadlines"]}}"#).unwrap();
        assert_eq!(cb.theme_for("deadline"), Some("w"));
    }
}
