//! Removal of personal information from respondent text.
//!
//! Detected spans are replaced by `[REDACTED:<KIND>]`. Existing markers are
//! left alone, so scrubbing already-scrubbed text changes nothing.

use std::collections::HashSet;
use std::fmt;

use once_cell::sync::Lazy;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::text::tokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PiiKind {
    Url,
    Email,
    Phone,
    Name,
}

impl PiiKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PiiKind::Url => "URL",
            PiiKind::Email => "EMAIL",
            PiiKind::Phone => "PHONE",
            PiiKind::Name => "NAME",
        }
    }

    pub fn marker(self) -> String {
        format!("[REDACTED:{}]", self.as_str())
    }
}

impl fmt::Display for PiiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A redacted span, as char offsets into the original text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Redaction {
    pub kind: PiiKind,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scrubbed {
    pub text: String,
    pub redactions: Vec<Redaction>,
}

static MARKER: Lazy<Regex> = Lazy::new(|| Regex::new(r"\[REDACTED:[A-Z]+\]").unwrap());
static URL: Lazy<Regex> =
    Lazy::new(|| Regex::new(r#"(?i)\b(?:https?://|ftp://|www\.)[^\s<>"'\[\]]+"#).unwrap());
pub(crate) static EMAIL: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"[A-Za-z0-9._%+\-]+@[A-Za-z0-9\-]+(?:\.[A-Za-z0-9\-]+)*\.[A-Za-z]{2,}").unwrap());

const MIN_PHONE_DIGITS: usize = 7;
const MAX_PHONE_DIGITS: usize = 15;

/// Capitalized words that are not names on their own account.
static NAME_ALLOWLIST: Lazy<HashSet<&'static str>> = Lazy::new(|| {
    [
        "i", "i'm", "i've", "i'd", "i'll", "monday", "tuesday", "wednesday", "thursday", "friday",
        "saturday", "sunday", "january", "february", "march", "april", "may", "june", "july",
        "august", "september", "october", "november", "december", "mr", "mrs", "ms", "dr", "prof",
        "sir", "madam", "god", "ok", "okay", "covid", "english", "hindi", "christmas", "easter",
        "diwali", "eid", "internet", "tv", "mental", "health", "who", "phq", "mhi", "ptsd", "adhd",
        "ocd", "ngo", "hr",
    ]
    .into_iter()
    .collect()
});

fn is_phone_sep(c: char) -> bool {
    matches!(c, ' ' | '\t' | '.' | '-' | '(' | ')')
}

/// Digits around a single decimal point, like `3.14159265`.
fn is_decimal(span: &[char]) -> bool {
    let mut non_digits = span.iter().filter(|c| !c.is_ascii_digit());
    non_digits.next() == Some(&'.') && non_digits.next().is_none()
}

/// Phone numbers: 7 to 15 digits, optionally led by `+` or `(`, separated by
/// spaces, dots, dashes or parentheses. A candidate touching a letter or
/// digit, or a decimal point, is not a phone number; this keeps hex tokens,
/// dates and decimals out.
pub fn find_phones(text: &str) -> Vec<(usize, usize)> {
    let chars: Vec<char> = text.chars().collect();
    let n = chars.len();
    let blocked_before = |i: usize| {
        i > 0 && {
            let p = chars[i - 1];
            p.is_alphanumeric() || (p == '.' && i > 1 && chars[i - 2].is_ascii_digit())
        }
    };
    let blocked_after = |j: usize| {
        j < n && {
            let c = chars[j];
            c.is_alphanumeric() || (c == '.' && j + 1 < n && chars[j + 1].is_ascii_digit())
        }
    };
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let lead = matches!(chars[i], '+' | '(') && i + 1 < n && chars[i + 1].is_ascii_digit();
        if !(chars[i].is_ascii_digit() || lead) || blocked_before(i) {
            i += 1;
            continue;
        }
        let mut j = if lead { i + 1 } else { i };
        let mut digits = 0;
        let mut best = None;
        while j < n && digits < MAX_PHONE_DIGITS {
            if !chars[j].is_ascii_digit() {
                break;
            }
            digits += 1;
            j += 1;
            if digits >= MIN_PHONE_DIGITS && !blocked_after(j) && !is_decimal(&chars[i..j]) {
                best = Some(j);
            }
            let mut k = j;
            while k < n && is_phone_sep(chars[k]) {
                k += 1;
            }
            if k < n && chars[k].is_ascii_digit() {
                j = k;
            } else {
                break;
            }
        }
        match best {
            Some(end) => {
                // keep a closing parenthesis that belongs to the number
                let end = if end < n && chars[end] == ')' && chars[i..end].contains(&'(') {
                    end + 1
                } else {
                    end
                };
                out.push((i, end));
                i = end;
            }
            None => i += 1,
        }
    }
    out
}

fn char_offset(text: &str, byte: usize) -> usize {
    text[..byte].chars().count()
}

fn regex_spans(re: &Regex, text: &str) -> Vec<(usize, usize)> {
    re.find_iter(text)
        .map(|m| {
            let trimmed = m.as_str().trim_end_matches(['.', ',', ';', ':', '!', '?', ')']);
            (char_offset(text, m.start()), char_offset(text, m.start() + trimmed.len()))
        })
        .filter(|(s, e)| e > s)
        .collect()
}

fn name_spans(text: &str) -> Vec<(usize, usize)> {
    let tokens = tokenize(text);
    let chars: Vec<char> = text.chars().collect();
    let is_candidate = |t: &crate::text::Token| {
        t.is_capitalized() && t.is_alphabetic() && !NAME_ALLOWLIST.contains(t.lower.as_str())
    };
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if !is_candidate(&tokens[i]) {
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < tokens.len()
            && is_candidate(&tokens[j])
            && chars[tokens[j - 1].end..tokens[j].start]
                .iter()
                .all(|c| *c == ' ')
        {
            j += 1;
        }
        let start = if tokens[i].sentence_initial { i + 1 } else { i };
        if j - start >= 2 {
            out.push((tokens[start].start, tokens[j - 1].end));
        }
        i = j;
    }
    out
}

/// Detects and replaces personal information. Earlier kinds win overlaps:
/// URLs, then emails, phones and names.
pub fn scrub_pii(text: &str) -> Scrubbed {
    let protected: Vec<(usize, usize)> = MARKER
        .find_iter(text)
        .map(|m| (char_offset(text, m.start()), char_offset(text, m.end())))
        .collect();

    let mut taken: Vec<Redaction> = Vec::new();
    let candidates = [
        (PiiKind::Url, regex_spans(&URL, text)),
        (PiiKind::Email, regex_spans(&EMAIL, text)),
        (PiiKind::Phone, find_phones(text)),
        (PiiKind::Name, name_spans(text)),
    ];
    for (kind, spans) in candidates {
        for (s, e) in spans {
            let overlaps = |a: usize, b: usize| s < b && a < e;
            if protected.iter().any(|&(a, b)| overlaps(a, b))
                || taken.iter().any(|r| overlaps(r.start, r.end))
            {
                continue;
            }
            taken.push(Redaction { kind, start: s, end: e });
        }
    }
    taken.sort_by_key(|r| r.start);

    let mut out = String::with_capacity(text.len());
    let mut pos = 0;
    let mut chars = text.chars();
    for r in &taken {
        out.extend(chars.by_ref().take(r.start - pos));
        chars.by_ref().take(r.end - r.start).for_each(drop);
        out.push_str(&r.kind.marker());
        pos = r.end;
    }
    out.extend(chars);
    Scrubbed {
        text: out,
        redactions: taken,
    }
}

/// True when the text still holds an email address or phone number.
pub fn contains_pii(text: &str) -> bool {
    EMAIL.is_match(text) || !find_phones(text).is_empty()
}
