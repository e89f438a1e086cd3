//! Rule-based noun and noun-phrase extraction with character offsets.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::text::{self, is_stopword, Token};

static NOUNS_TXT: &str = include_str!("../../data/nouns.txt");

const NOUN_SUFFIXES: [&str; 6] = ["tion", "ment", "ness", "ship", "ics", "ity"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntityLabel {
    CommonNoun,
    ProperNoun,
}

/// A distinct noun or noun phrase found in one response. `start`/`end` locate
/// the first mention; `mentions` lists every occurrence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub surface: String,
    pub lemma: String,
    pub start: usize,
    pub end: usize,
    pub label: EntityLabel,
    pub salience: f64,
    #[serde(default)]
    pub mentions: Vec<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct NounLexicon {
    words: HashSet<String>,
}

impl NounLexicon {
    pub fn bundled() -> Self {
        Self::from_words(
            NOUNS_TXT
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#')),
        )
    }

    pub fn from_words<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = HashSet::new();
        for w in words {
            let w = w.as_ref().to_lowercase();
            set.insert(text::lemmatize(&w));
            set.insert(w);
        }
        Self { words: set }
    }

    pub fn is_common_noun(&self, lower: &str) -> bool {
        if self.words.contains(lower) {
            return true;
        }
        let lemma = text::lemmatize(lower);
        if self.words.contains(&lemma) {
            return true;
        }
        NOUN_SUFFIXES
            .iter()
            .any(|s| lemma.len() > s.len() + 1 && lemma.ends_with(s))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

fn classify(token: &Token, nouns: &NounLexicon) -> Option<EntityLabel> {
    if !token.is_alphabetic() || is_stopword(&token.lower) {
        return None;
    }
    if token.is_capitalized() && !token.sentence_initial {
        return Some(EntityLabel::ProperNoun);
    }
    nouns
        .is_common_noun(&token.lower)
        .then_some(EntityLabel::CommonNoun)
}

/// Lemma of a phrase: modifiers lowercased as-is, head word lemmatized.
pub fn phrase_lemma(words: &[&Token]) -> String {
    let (head, modifiers) = words.split_last().expect("phrase has at least one token");
    modifiers
        .iter()
        .map(|t| t.lower.clone())
        .chain(std::iter::once(head.lemma()))
        .collect::<Vec<_>>()
        .join(" ")
}

struct Mention {
    lemma: String,
    label: EntityLabel,
    start: usize,
    end: usize,
    first_token: usize,
}

fn mentions(source: &str, tokens: &[Token], nouns: &NounLexicon) -> Vec<Mention> {
    let chars: Vec<char> = source.chars().collect();
    let labels: Vec<_> = tokens.iter().map(|t| classify(t, nouns)).collect();

    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if labels[i].is_none() {
            i += 1;
            continue;
        }
        let first = i;
        while i + 1 < tokens.len()
            && labels[i + 1].is_some()
            && chars[tokens[i].end..tokens[i + 1].start]
                .iter()
                .all(|c| c.is_whitespace())
        {
            i += 1;
        }
        let run: Vec<&Token> = tokens[first..=i].iter().collect();
        let label = if labels[first..=i]
            .iter()
            .all(|l| *l == Some(EntityLabel::ProperNoun))
        {
            EntityLabel::ProperNoun
        } else {
            EntityLabel::CommonNoun
        };
        out.push(Mention {
            lemma: phrase_lemma(&run),
            label,
            start: tokens[first].start,
            end: tokens[i].end,
            first_token: first,
        });
        i += 1;
    }
    out
}

/// Extracts distinct entities in order of first occurrence.
///
/// Salience of a lemma is `tf * (1 + (1 - first_token / token_count))`,
/// normalized so the saliences of one response sum to 1.
pub fn extract_entities_with(text: &str, nouns: &NounLexicon) -> Vec<Entity> {
    let tokens = text::tokenize(text);
    if tokens.is_empty() {
        return Vec::new();
    }
    let n = tokens.len() as f64;

    let mut entities: Vec<Entity> = Vec::new();
    let mut first_tokens: Vec<usize> = Vec::new();
    for m in mentions(text, &tokens, nouns) {
        match entities.iter_mut().find(|e| e.lemma == m.lemma) {
            Some(e) => e.mentions.push((m.start, m.end)),
            None => {
                first_tokens.push(m.first_token);
                entities.push(Entity {
                    surface: text::slice_chars(text, m.start, m.end),
                    lemma: m.lemma,
                    start: m.start,
                    end: m.end,
                    label: m.label,
                    salience: 0.0,
                    mentions: vec![(m.start, m.end)],
                });
            }
        }
    }

    let raw: Vec<f64> = entities
        .iter()
        .zip(&first_tokens)
        .map(|(e, &first)| e.mentions.len() as f64 * (1.0 + (1.0 - first as f64 / n)))
        .collect();
    let total: f64 = raw.iter().sum();
    for (e, r) in entities.iter_mut().zip(raw) {
        e.salience = r / total;
    }
    entities
}
