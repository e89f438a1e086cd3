//! Frequency-of-occurrence recognition and normalization to a per-day rate.
//!
//! Three rule kinds, tried in precedence order:
//!
//! 1. count patterns: `x times`, `x-y times` (midpoint `(x+y)/2`), and count
//!    words such as `twice`, optionally followed by a period (`a week`,
//!    `daily`). Counts without a period inherit the question's period.
//! 2. fixed rates: words with an intrinsic per-day rate (`fortnightly`).
//! 3. period fractions: adverbs giving the share of days on which the
//!    activity happens (`daily` = 1.0, `sometimes` = 0.4).
//!
//! A match whose span lies strictly inside a longer match is discarded before
//! precedence is applied, so `once in a while` is not read as the count
//! `once`.

use std::fmt;
use std::str::FromStr;

use once_cell::sync::Lazy;
use regex::{Captures, Regex};
use serde::{Deserialize, Serialize};

use super::lexicon::{self, Row, TableError};
use crate::text::LoweredText;

static VOCABULARY_TSV: &str = include_str!("../../data/frequency_vocabulary.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivityUnit {
    Times,
    Days,
    Hours,
    Minutes,
    Sessions,
}

impl ActivityUnit {
    pub const ALL: [ActivityUnit; 5] = [
        ActivityUnit::Times,
        ActivityUnit::Days,
        ActivityUnit::Hours,
        ActivityUnit::Minutes,
        ActivityUnit::Sessions,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ActivityUnit::Times => "times",
            ActivityUnit::Days => "days",
            ActivityUnit::Hours => "hours",
            ActivityUnit::Minutes => "minutes",
            ActivityUnit::Sessions => "sessions",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodUnit {
    Day,
    Week,
    Month,
    Year,
}

impl PeriodUnit {
    pub const ALL: [PeriodUnit; 4] = [
        PeriodUnit::Day,
        PeriodUnit::Week,
        PeriodUnit::Month,
        PeriodUnit::Year,
    ];

    /// Length in days. A month is 30.57 days.
    pub fn days(self) -> f64 {
        match self {
            PeriodUnit::Day => 1.0,
            PeriodUnit::Week => 7.0,
            PeriodUnit::Month => 30.57,
            PeriodUnit::Year => 365.25,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PeriodUnit::Day => "day",
            PeriodUnit::Week => "week",
            PeriodUnit::Month => "month",
            PeriodUnit::Year => "year",
        }
    }

    fn from_word(word: &str) -> Option<Self> {
        Some(match word {
            "day" | "days" | "daily" | "night" | "nights" | "nightly" => PeriodUnit::Day,
            "week" | "weeks" | "weekly" => PeriodUnit::Week,
            "month" | "months" | "monthly" => PeriodUnit::Month,
            "year" | "years" | "yearly" | "annually" => PeriodUnit::Year,
            _ => return None,
        })
    }
}

impl fmt::Display for ActivityUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for PeriodUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Units a frequency question asks for, e.g. days per month.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuestionUnits {
    pub activity: ActivityUnit,
    pub period: PeriodUnit,
}

impl QuestionUnits {
    pub fn new(activity: ActivityUnit, period: PeriodUnit) -> Self {
        Self { activity, period }
    }
}

impl FromStr for QuestionUnits {
    type Err = String;

    /// Parses `days/week` or `days per week`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_lowercase();
        let (a, p) = s
            .split_once('/')
            .or_else(|| s.split_once(" per "))
            .ok_or_else(|| format!("expected <activity>/<period>, got {s:?}"))?;
        let activity = ActivityUnit::ALL
            .into_iter()
            .find(|u| u.as_str() == a.trim())
            .ok_or_else(|| format!("unknown activity unit {a:?}"))?;
        let period = PeriodUnit::from_word(p.trim())
            .ok_or_else(|| format!("unknown period unit {p:?}"))?;
        Ok(Self { activity, period })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    DefiniteCount,
    Range,
    Adverb,
    OrdinalWord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyScore {
    /// Character offsets of the matched phrase.
    pub matched_span: (usize, usize),
    pub per_day_rate: f64,
    pub source_kind: SourceKind,
    pub vocabulary_key: String,
    /// Occurrences per `period` for count matches (the midpoint for ranges).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<PeriodUnit>,
}

impl FrequencyScore {
    /// Occurrences per `unit`: `per_day_rate * unit.days()`.
    pub fn rate_in(&self, unit: PeriodUnit) -> f64 {
        self.per_day_rate * unit.days()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencyRule {
    /// Occurrences per period.
    CountPattern(f64),
    /// Occurrences per day.
    FixedRate(f64),
    /// Share of days in a period, in `[0, 1]`.
    PeriodFraction(f64),
}

impl FrequencyRule {
    fn precedence(self) -> u8 {
        match self {
            FrequencyRule::CountPattern(_) => 0,
            FrequencyRule::FixedRate(_) => 1,
            FrequencyRule::PeriodFraction(_) => 2,
        }
    }
}

#[derive(Debug, Clone)]
struct VocabEntry {
    term: String,
    rule: FrequencyRule,
    pattern: Regex,
}

#[derive(Debug, Clone)]
pub struct FrequencyVocabulary {
    entries: Vec<VocabEntry>,
}

const NUMBER_WORDS: [(&str, f64); 23] = [
    ("zero", 0.0),
    ("one", 1.0),
    ("two", 2.0),
    ("three", 3.0),
    ("four", 4.0),
    ("five", 5.0),
    ("six", 6.0),
    ("seven", 7.0),
    ("eight", 8.0),
    ("nine", 9.0),
    ("ten", 10.0),
    ("eleven", 11.0),
    ("twelve", 12.0),
    ("thirteen", 13.0),
    ("fourteen", 14.0),
    ("fifteen", 15.0),
    ("sixteen", 16.0),
    ("seventeen", 17.0),
    ("eighteen", 18.0),
    ("nineteen", 19.0),
    ("twenty", 20.0),
    ("a couple of", 2.0),
    ("a couple", 2.0),
];

const PERIOD_SUFFIX: &str = r"(?:\s*(?:a|an|per|each|every|in\s+a|in\s+the|/)\s*(?P<period>day|night|week|month|year)s?\b|\s+(?P<adverb>daily|nightly|weekly|monthly|yearly|annually)\b)";

static COUNT_PATTERN: Lazy<Regex> = Lazy::new(|| {
    let words = NUMBER_WORDS
        .iter()
        .map(|(w, _)| w.replace(' ', r"\s+"))
        .collect::<Vec<_>>()
        .join("|");
    let num = format!(r"(?:\d+(?:\.\d+)?|(?:{words})\b)");
    Regex::new(&format!(
        r"\b(?P<a>{num})(?:\s*(?:-|–|to|or)\s*(?P<b>{num}))?(?:\s*(?P<unit>times|time|x|days|day|nights|night|hours|hour|hrs|hr|minutes|minute|mins|min|sessions|session)\b)?{PERIOD_SUFFIX}?"
    ))
    .unwrap()
});

fn parse_count(s: &str) -> Option<f64> {
    let norm = s.split_whitespace().collect::<Vec<_>>().join(" ");
    NUMBER_WORDS
        .iter()
        .find(|(w, _)| *w == norm)
        .map(|(_, v)| *v)
        .or_else(|| norm.parse().ok())
}

fn captured_period(caps: &Captures<'_>) -> Option<PeriodUnit> {
    caps.name("period")
        .or_else(|| caps.name("adverb"))
        .and_then(|m| PeriodUnit::from_word(m.as_str()))
}

#[derive(Debug)]
struct Candidate {
    start: usize,
    end: usize,
    precedence: u8,
    /// Bare numbers without a unit or period rank below other counts.
    bare: bool,
    score: FrequencyScore,
}

impl FrequencyVocabulary {
    pub fn bundled() -> Self {
        Self::parse(VOCABULARY_TSV).expect("bundled frequency vocabulary is valid")
    }

    pub fn parse(content: &str) -> Result<Self, TableError> {
        Self::from_rows(lexicon::parse_table(content)?)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, TableError> {
        Self::from_rows(lexicon::read_table(path)?)
    }

    fn from_rows(rows: Vec<Row>) -> Result<Self, TableError> {
        let mut entries = Vec::with_capacity(rows.len());
        for row in rows {
            let err = |message: String| TableError::Syntax {
                line: row.line,
                message,
            };
            let (kind, value) = row
                .value
                .split_once(char::is_whitespace)
                .ok_or_else(|| err("expected `<kind> <value>`".into()))?;
            let value = lexicon::parse_number(value)
                .ok_or_else(|| err(format!("invalid number {value:?}")))?;
            let rule = match kind {
                "count" if value >= 0.0 => FrequencyRule::CountPattern(value),
                "rate" if value >= 0.0 => FrequencyRule::FixedRate(value),
                "fraction" if (0.0..=1.0).contains(&value) => FrequencyRule::PeriodFraction(value),
                "count" | "rate" | "fraction" => {
                    return Err(err(format!("{kind} value {value} out of range")))
                }
                other => return Err(err(format!("unknown rule kind {other:?}"))),
            };
            let escaped = row
                .term
                .split(' ')
                .map(regex::escape)
                .collect::<Vec<_>>()
                .join(r"\s+");
            let pattern = match rule {
                FrequencyRule::CountPattern(_) => format!(r"\b{escaped}\b{PERIOD_SUFFIX}?"),
                _ => format!(r"\b{escaped}\b"),
            };
            entries.push(VocabEntry {
                term: row.term,
                rule,
                pattern: Regex::new(&pattern).map_err(|e| err(e.to_string()))?,
            });
        }
        Ok(Self { entries })
    }

    pub fn rule(&self, term: &str) -> Option<FrequencyRule> {
        self.entries.iter().find(|e| e.term == term).map(|e| e.rule)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Finds the highest-precedence frequency expression in `text` and
    /// normalizes it to occurrences per day.
    pub fn score(&self, text: &str, units: QuestionUnits) -> Option<FrequencyScore> {
        let lowered = LoweredText::new(text);
        let mut candidates = Vec::new();

        for caps in COUNT_PATTERN.captures_iter(&lowered.lower) {
            let whole = caps.get(0).unwrap();
            let Some(a) = parse_count(&caps["a"]) else {
                continue;
            };
            let b = caps.name("b").and_then(|m| parse_count(m.as_str()));
            let has_unit = caps.name("unit").is_some();
            let explicit = captured_period(&caps);
            let period = explicit.unwrap_or(units.period);
            let (count, kind, key) = match b {
                Some(b) => ((a + b) / 2.0, SourceKind::Range, "x-y times"),
                None if has_unit || explicit.is_some() => (a, SourceKind::DefiniteCount, "x times"),
                None => (a, SourceKind::DefiniteCount, "x"),
            };
            let (start, end) = lowered.char_span(whole.start(), whole.end());
            candidates.push(Candidate {
                start,
                end,
                precedence: 0,
                bare: !has_unit && explicit.is_none() && b.is_none(),
                score: FrequencyScore {
                    matched_span: (start, end),
                    per_day_rate: count / period.days(),
                    source_kind: kind,
                    vocabulary_key: key.into(),
                    count: Some(count),
                    period: Some(period),
                },
            });
        }

        for entry in &self.entries {
            for caps in entry.pattern.captures_iter(&lowered.lower) {
                let whole = caps.get(0).unwrap();
                let (start, end) = lowered.char_span(whole.start(), whole.end());
                let (per_day, kind, count, period) = match entry.rule {
                    FrequencyRule::CountPattern(c) => {
                        let period = captured_period(&caps).unwrap_or(units.period);
                        (c / period.days(), SourceKind::OrdinalWord, Some(c), Some(period))
                    }
                    FrequencyRule::FixedRate(r) => (r, SourceKind::Adverb, None, None),
                    FrequencyRule::PeriodFraction(f) => (f, SourceKind::Adverb, None, None),
                };
                candidates.push(Candidate {
                    start,
                    end,
                    precedence: entry.rule.precedence(),
                    bare: false,
                    score: FrequencyScore {
                        matched_span: (start, end),
                        per_day_rate: per_day,
                        source_kind: kind,
                        vocabulary_key: entry.term.clone(),
                        count,
                        period,
                    },
                });
            }
        }

        let contained = |c: &Candidate| {
            candidates.iter().any(|o| {
                o.start <= c.start && c.end <= o.end && (o.end - o.start) > (c.end - c.start)
            })
        };
        candidates
            .iter()
            .filter(|c| !contained(c))
            .min_by_key(|c| (c.precedence, c.bare, c.start, std::cmp::Reverse(c.end)))
            .map(|c| c.score.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn units(a: ActivityUnit, p: PeriodUnit) -> QuestionUnits {
        QuestionUnits::new(a, p)
    }

    fn score(text: &str, p: PeriodUnit) -> Option<FrequencyScore> {
        FrequencyVocabulary::bundled().score(text, units(ActivityUnit::Times, p))
    }

    #[test]
    fn range_midpoint() {
        let s = score("3-5 times", PeriodUnit::Week).unwrap();
        assert_eq!(s.count, Some(4.0));
        assert_eq!(s.source_kind, SourceKind::Range);
        assert_eq!(s.vocabulary_key, "x-y times");
        assert_eq!(s.per_day_rate, 4.0 / 7.0);
    }

    #[test]
    fn daily_is_every_day_of_the_week() {
        let s = FrequencyVocabulary::bundled()
            .score("daily", units(ActivityUnit::Days, PeriodUnit::Week))
            .unwrap();
        assert_eq!(s.rate_in(PeriodUnit::Week), 7.0);
    }

    #[test]
    fn month_count() {
        let s = FrequencyVocabulary::bundled()
            .score("4 days", units(ActivityUnit::Days, PeriodUnit::Month))
            .unwrap();
        assert_eq!(s.per_day_rate, 4.0 / 30.57);
        assert!((s.per_day_rate - 0.1308472358521426).abs() < 1e-12);
    }

    #[test]
    fn never_is_zero() {
        let s = score("never", PeriodUnit::Week).unwrap();
        assert_eq!(s.per_day_rate, 0.0);
    }

    #[test]
    fn explicit_period_overrides_question() {
        let s = score("twice a month", PeriodUnit::Week).unwrap();
        assert_eq!(s.period, Some(PeriodUnit::Month));
        assert_eq!(s.source_kind, SourceKind::OrdinalWord);
        assert_eq!(s.per_day_rate, 2.0 / 30.57);

        let s = score("maybe 3 times weekly", PeriodUnit::Month).unwrap();
        assert_eq!(s.per_day_rate, 3.0 / 7.0);
    }

    #[test]
    fn longer_phrase_wins_over_contained_count() {
        let s = score("once in a while", PeriodUnit::Week).unwrap();
        assert_eq!(s.vocabulary_key, "once in a while");
        assert_eq!(s.per_day_rate, 0.2);
    }

    #[test]
    fn fixed_rate() {
        let s = score("fortnightly", PeriodUnit::Month).unwrap();
        assert_eq!(s.per_day_rate, 1.0 / 14.0);
    }

    #[test]
    fn count_beats_adverb() {
        let s = score("usually about 2 times", PeriodUnit::Week).unwrap();
        assert_eq!(s.vocabulary_key, "x times");
        let s = score("twice, sometimes 2 times", PeriodUnit::Week).unwrap();
        assert_eq!(s.count, Some(2.0));
    }

    #[test]
    fn number_words_and_offsets() {
        let text = "Roughly Five times a week";
        let s = score(text, PeriodUnit::Month).unwrap();
        assert_eq!(s.count, Some(5.0));
        let (a, b) = s.matched_span;
        assert_eq!(crate::text::slice_chars(text, a, b), "Five times a week");
    }

    #[test]
    fn words_inside_other_words_do_not_count() {
        assert!(score("someone often tends to", PeriodUnit::Week)
            .is_some_and(|s| s.vocabulary_key == "often"));
        assert!(score("no idea", PeriodUnit::Week).is_none());
    }

    #[test]
    fn bare_number_ranks_below_unit_count() {
        let s = score("I'm 21 and go 3 times a week", PeriodUnit::Month).unwrap();
        assert_eq!(s.count, Some(3.0));
    }

    #[test]
    fn unit_strings() {
        let u: QuestionUnits = "days/week".parse().unwrap();
        assert_eq!(u, units(ActivityUnit::Days, PeriodUnit::Week));
        assert!("days/fortnight".parse::<QuestionUnits>().is_err());
    }

    #[test]
    fn vocabulary_rejects_bad_rows() {
        assert!(FrequencyVocabulary::parse("often\tfraction 1.5\n").is_err());
        assert!(FrequencyVocabulary::parse("often\tsomething 0.5\n").is_err());
        let v = FrequencyVocabulary::parse("every blue moon\trate 1/1000\n").unwrap();
        assert_eq!(v.rule("every blue moon"), Some(FrequencyRule::FixedRate(0.001)));
    }
}
