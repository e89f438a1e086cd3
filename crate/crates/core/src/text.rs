//! Tokenization and light normalization shared by the analyzers.
//!
//! All offsets produced here are *character* offsets into the source string,
//! so `slice_chars(source, start, end)` reproduces the token surface.

use std::collections::HashSet;

use once_cell::sync::Lazy;
use regex::Regex;

static STOPWORDS_TXT: &str = include_str!("../data/stopwords.txt");

static STOPWORDS: Lazy<HashSet<&'static str>> = Lazy::new(|| {
    STOPWORDS_TXT
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
});

static REDACTION_MARKER: Lazy<Regex> = Lazy::new(|| Regex::new(r"\[REDACTED:[A-Z]+\]").unwrap());

/// True for function words that never become entities or theme candidates.
pub fn is_stopword(lower: &str) -> bool {
    STOPWORDS.contains(lower)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lower: String,
    /// Character offset of the first char.
    pub start: usize,
    /// Character offset one past the last char.
    pub end: usize,
    /// First token of the text or of a sentence (after `.`, `!`, `?` or a newline).
    pub sentence_initial: bool,
}

impl Token {
    pub fn is_capitalized(&self) -> bool {
        let mut chars = self.surface.chars();
        match chars.next() {
            Some(c) if c.is_uppercase() => chars.any(|c| c.is_lowercase()),
            _ => false,
        }
    }

    pub fn is_alphabetic(&self) -> bool {
        self.surface
            .chars()
            .all(|c| c.is_alphabetic() || c == '\'' || c == '\u{2019}')
    }

    pub fn lemma(&self) -> String {
        lemmatize(&self.lower)
    }
}

fn is_apostrophe(c: char) -> bool {
    c == '\'' || c == '\u{2019}'
}

/// Splits on Unicode whitespace and punctuation. Apostrophes between two
/// alphanumeric chars stay inside the word (`don't`, `I'm`). Redaction
/// markers left by the PII scrubber are skipped entirely.
pub fn tokenize(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();

    let mut skip = vec![false; chars.len()];
    for m in REDACTION_MARKER.find_iter(text) {
        let start = text[..m.start()].chars().count();
        let len = m.as_str().chars().count();
        for flag in &mut skip[start..start + len] {
            *flag = true;
        }
    }

    let mut tokens = Vec::new();
    let mut sentence_start = true;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if skip[i] {
            i += 1;
            continue;
        }
        if !c.is_alphanumeric() {
            if matches!(c, '.' | '!' | '?' | '\n') {
                sentence_start = true;
            }
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !skip[i] {
            let c = chars[i];
            if c.is_alphanumeric() {
                i += 1;
            } else if is_apostrophe(c)
                && i + 1 < chars.len()
                && chars[i + 1].is_alphanumeric()
                && i > start
            {
                i += 1;
            } else {
                break;
            }
        }
        let surface: String = chars[start..i].iter().collect();
        let lower = surface.to_lowercase().replace('\u{2019}', "'");
        tokens.push(Token {
            surface,
            lower,
            start,
            end: i,
            sentence_initial: sentence_start,
        });
        sentence_start = false;
    }
    tokens
}

/// Lowercase lemma by suffix stripping. A suffix is removed only when the
/// remaining stem keeps at least four characters.
pub fn lemmatize(word: &str) -> String {
    const MIN_STEM: usize = 4;
    let w = word.to_lowercase().replace('\u{2019}', "'");
    let w = w.strip_suffix("'s").unwrap_or(&w).to_string();
    let len = w.chars().count();

    if let Some(stem) = w.strip_suffix("ies") {
        if len - 3 >= MIN_STEM - 1 {
            return format!("{stem}y");
        }
    }
    if let Some(stem) = w.strip_suffix("ing") {
        if len - 3 >= MIN_STEM {
            return stem.to_string();
        }
    }
    if let Some(stem) = w.strip_suffix("ed") {
        if len - 2 >= MIN_STEM {
            return stem.to_string();
        }
    }
    if let Some(stem) = w.strip_suffix("es") {
        let sibilant = ["s", "x", "z", "ch", "sh"].iter().any(|s| stem.ends_with(s));
        if sibilant {
            return if len - 2 >= MIN_STEM { stem.to_string() } else { w };
        }
    }
    if let Some(stem) = w.strip_suffix('s') {
        let keep = ["ss", "us", "is"].iter().any(|s| w.ends_with(s));
        if !keep && len - 1 >= MIN_STEM {
            return stem.to_string();
        }
    }
    w
}

/// Substring by character offsets.
pub fn slice_chars(text: &str, start: usize, end: usize) -> String {
    text.chars().skip(start).take(end.saturating_sub(start)).collect()
}

/// Lowercased copy of a text that remembers, for every byte of the lowered
/// string, which character of the original it came from. Regex matches on
/// the lowered text can then be reported as original character offsets.
#[derive(Debug, Clone)]
pub struct LoweredText {
    pub lower: String,
    byte_to_char: Vec<usize>,
    pub char_len: usize,
}

impl LoweredText {
    pub fn new(text: &str) -> Self {
        let mut lower = String::with_capacity(text.len());
        let mut byte_to_char = Vec::with_capacity(text.len());
        let mut char_len = 0;
        for (ci, c) in text.chars().enumerate() {
            for lc in c.to_lowercase() {
                let before = lower.len();
                lower.push(if lc == '\u{2019}' { '\'' } else { lc });
                byte_to_char.extend(std::iter::repeat_n(ci, lower.len() - before));
            }
            char_len = ci + 1;
        }
        Self {
            lower,
            byte_to_char,
            char_len,
        }
    }

    /// Maps a byte range of [`Self::lower`] to a character range of the source.
    pub fn char_span(&self, byte_start: usize, byte_end: usize) -> (usize, usize) {
        let start = self
            .byte_to_char
            .get(byte_start)
            .copied()
            .unwrap_or(self.char_len);
        let end = if byte_end == 0 {
            0
        } else {
            self.byte_to_char
                .get(byte_end - 1)
                .map(|c| c + 1)
                .unwrap_or(self.char_len)
        };
        (start, end)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_carry_char_offsets() {
        let text = "Café visits, don't stop. Then sleep";
        let tokens = tokenize(text);
        let surfaces: Vec<_> = tokens.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(surfaces, ["Café", "visits", "don't", "stop", "Then", "sleep"]);
        for t in &tokens {
            assert_eq!(slice_chars(text, t.start, t.end), t.surface);
        }
        assert!(tokens[0].sentence_initial);
        assert!(!tokens[1].sentence_initial);
        assert!(tokens[4].sentence_initial);
    }

    #[test]
    fn redaction_markers_are_not_tokens() {
        let tokens = tokenize("ask [REDACTED:NAME] about [REDACTED:EMAIL]");
        let surfaces: Vec<_> = tokens.iter().map(|t| t.lower.as_str()).collect();
        assert_eq!(surfaces, ["ask", "about"]);
    }

    #[test]
    fn lemma_guard() {
        assert_eq!(lemmatize("academics"), "academic");
        assert_eq!(lemmatize("cigarettes"), "cigarette");
        assert_eq!(lemmatize("anxieties"), "anxiety");
        assert_eq!(lemmatize("stress"), "stress");
        assert_eq!(lemmatize("days"), "days");
        assert_eq!(lemmatize("sleeping"), "sleep");
        assert_eq!(lemmatize("boxes"), "boxes");
        assert_eq!(lemmatize("Judgement"), "judgement");
        assert_eq!(lemmatize("friend's"), "friend");
    }

    #[test]
    fn lowered_text_maps_back() {
        let src = "İstanbul Daily";
        let lt = LoweredText::new(src);
        let b = lt.lower.find("daily").unwrap();
        let (s, e) = lt.char_span(b, b + 5);
        assert_eq!(slice_chars(src, s, e), "Daily");
    }
}
