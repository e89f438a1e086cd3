//! Turning a (scrubbed) utterance into an answer value.

use once_cell::sync::Lazy;
use regex::Regex;

use crate::answer::AnswerValue;
use crate::script::ResponseKind;
use crate::text::tokenize;

const NUMBER_WORDS: [&str; 11] = [
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten",
];

const AFFIRMATIONS: &[&str] = &[
    "yes", "yeah", "yep", "yup", "yea", "ya", "y", "sure", "definitely", "absolutely",
    "certainly", "affirmative", "correct", "indeed", "aye", "ok", "okay", "true",
];

const NEGATIONS: &[&str] = &[
    "no", "nope", "nah", "never", "not", "n", "negative", "false", "none", "nothing",
];

static INTEGER: Lazy<Regex> = Lazy::new(|| Regex::new(r"-?\d+").unwrap());

/// Parse result: the value, or the message asking the respondent to retry.
pub type Parsed = Result<AnswerValue, String>;

fn range_message(min: i64, max: i64, labels: Option<&[String]>) -> String {
    let mut msg = format!("Please answer with a number from {min} to {max}");
    if let Some(labels) = labels {
        let named: Vec<String> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| format!("{} = {l}", min + i as i64))
            .collect();
        msg.push_str(&format!(" ({})", named.join(", ")));
    }
    msg.push('.');
    msg
}

/// Scale answers: the first integer, a number word from zero to ten, or the
/// text of one of the labels.
pub fn parse_scale(text: &str, min: i64, max: i64, labels: Option<&[String]>) -> Parsed {
    let lower = text.trim().to_lowercase();
    let retry = || range_message(min, max, labels);

    if let Some(labels) = labels {
        // whole-answer label match first, so "4 - most of the time" and
        // "most of the time" agree
        let stripped = lower.trim_end_matches(['.', '!']);
        if let Some(i) = labels.iter().position(|l| l.to_lowercase() == stripped) {
            return Ok(AnswerValue::Scale(min + i as i64));
        }
    }
    let value = INTEGER
        .find(&lower)
        .and_then(|m| m.as_str().parse::<i64>().ok())
        .or_else(|| {
            tokenize(&lower)
                .iter()
                .find_map(|t| NUMBER_WORDS.iter().position(|w| *w == t.lower))
                .map(|i| i as i64)
        })
        .or_else(|| {
            let labels = labels?;
            // longest label contained in the answer
            labels
                .iter()
                .enumerate()
                .filter(|(_, l)| !l.is_empty() && lower.contains(&l.to_lowercase()))
                .max_by_key(|(_, l)| l.len())
                .map(|(i, _)| min + i as i64)
        });
    match value {
        Some(v) if (min..=max).contains(&v) => Ok(AnswerValue::Scale(v)),
        _ => Err(retry()),
    }
}

/// Yes/no answers: the first affirmation or negation word decides.
pub fn parse_yes_no(text: &str) -> Parsed {
    for t in tokenize(text) {
        let w = t.lower.as_str();
        if AFFIRMATIONS.contains(&w) {
            return Ok(AnswerValue::YesNo(true));
        }
        if NEGATIONS.contains(&w) || w.ends_with("n't") {
            return Ok(AnswerValue::YesNo(false));
        }
    }
    Err("Please answer yes or no.".to_string())
}

pub fn parse_text(text: &str) -> Parsed {
    let t = text.trim();
    if t.is_empty() {
        Err("Please type a few words in reply.".to_string())
    } else {
        Ok(AnswerValue::Text(t.to_string()))
    }
}

pub fn parse_reply(kind: &ResponseKind, text: &str) -> Parsed {
    match kind {
        ResponseKind::ObjectiveScale { min, max, labels } => {
            parse_scale(text, *min, *max, labels.as_deref())
        }
        ResponseKind::YesNo => parse_yes_no(text),
        ResponseKind::FreeText | ResponseKind::Frequency { .. } => parse_text(text),
    }
}
