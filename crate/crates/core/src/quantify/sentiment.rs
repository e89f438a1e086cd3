//! Lexicon sentiment with negation scope.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::lexicon::{self, Row, TableError};
use crate::text::{self, Token};

static LEXICON_TSV: &str = include_str!("../../data/sentiment_lexicon.tsv");

/// Number of tokens before a lexicon term searched for a negator.
pub const NEGATION_WINDOW: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentimentResult {
    /// Mean signed weight of matched terms, in `[-1, 1]`.
    pub score: f64,
    /// Sum of absolute matched weights divided by the token count.
    pub magnitude: f64,
    pub matched_terms: Vec<(String, f64)>,
    pub token_count: usize,
}

impl SentimentResult {
    fn empty(token_count: usize) -> Self {
        Self {
            score: 0.0,
            magnitude: 0.0,
            matched_terms: Vec::new(),
            token_count,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SentimentLexicon {
    weights: HashMap<String, f64>,
}

pub fn is_negator(token: &Token) -> bool {
    matches!(
        token.lower.as_str(),
        "not" | "never" | "no" | "cannot" | "dont" | "cant" | "wont" | "isnt" | "didnt"
    ) || token.lower.ends_with("n't")
}

impl SentimentLexicon {
    pub fn bundled() -> Self {
        Self::parse(LEXICON_TSV).expect("bundled sentiment lexicon is valid")
    }

    pub fn parse(content: &str) -> Result<Self, TableError> {
        Self::from_rows(lexicon::parse_table(content)?)
    }

    pub fn load(path: &Path) -> Result<Self, TableError> {
        Self::from_rows(lexicon::read_table(path)?)
    }

    fn from_rows(rows: Vec<Row>) -> Result<Self, TableError> {
        let mut weights = HashMap::with_capacity(rows.len());
        for row in rows {
            let w = lexicon::parse_number(&row.value)
                .filter(|w| (-1.0..=1.0).contains(w))
                .ok_or_else(|| TableError::Syntax {
                    line: row.line,
                    message: format!("weight {:?} is not a number in [-1, 1]", row.value),
                })?;
            weights.insert(row.term, w);
        }
        Ok(Self { weights })
    }

    pub fn weight(&self, term: &str) -> Option<f64> {
        self.weights.get(term).copied()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    fn lookup(&self, token: &Token) -> Option<(String, f64)> {
        if let Some(w) = self.weights.get(&token.lower) {
            return Some((token.lower.clone(), *w));
        }
        let lemma = token.lemma();
        self.weights.get(&lemma).map(|w| (lemma, *w))
    }

    pub fn analyze(&self, text: &str) -> SentimentResult {
        let tokens = text::tokenize(text);
        let mut matched = Vec::new();
        for (i, token) in tokens.iter().enumerate() {
            if is_negator(token) {
                continue;
            }
            let Some((term, weight)) = self.lookup(token) else {
                continue;
            };
            let negated = tokens[i.saturating_sub(NEGATION_WINDOW)..i]
                .iter()
                .any(is_negator);
            matched.push((term, if negated { -weight } else { weight }));
        }
        if matched.is_empty() {
            return SentimentResult::empty(tokens.len());
        }
        let signed: f64 = matched.iter().map(|(_, w)| w).sum();
        let absolute: f64 = matched.iter().map(|(_, w)| w.abs()).sum();
        SentimentResult {
            score: signed / matched.len() as f64,
            magnitude: absolute / tokens.len() as f64,
            matched_terms: matched,
            token_count: tokens.len(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_is_neutral() {
        let r = SentimentLexicon::bundled().analyze("");
        assert_eq!((r.score, r.magnitude), (0.0, 0.0));
        assert!(r.matched_terms.is_empty());
    }

    #[test]
    fn negation_flips_sign() {
        let lex = SentimentLexicon::bundled();
        let pos = lex.analyze("therapy is helpful");
        let neg = lex.analyze("therapy is not helpful");
        assert!(pos.score > 0.0);
        assert_eq!(pos.score, -neg.score);
        let contracted = lex.analyze("therapy isn't helpful");
        assert_eq!(contracted.score, neg.score);
    }

    #[test]
    fn negator_outside_window_does_not_flip() {
        let lex = SentimentLexicon::bundled();
        let r = lex.analyze("not that it was ever very helpful");
        assert!(r.score > 0.0);
        let r = lex.analyze("not ever very helpful");
        assert!(r.score < 0.0);
    }

    #[test]
    fn score_and_magnitude_definitions() {
        let lex = SentimentLexicon::parse("good\t0.6\nbad\t-0.4\n").unwrap();
        let r = lex.analyze("good days and bad days");
        assert!((r.score - 0.1).abs() < 1e-15);
        assert!((r.magnitude - 1.0 / 5.0).abs() < 1e-15);
    }

    #[test]
    fn weights_must_be_in_range() {
        assert!(SentimentLexicon::parse("great\t1.5\n").is_err());
    }

    #[test]
    fn bundled_lexicon_size() {
        assert!(SentimentLexicon::bundled().len() > 1000);
    }
}
