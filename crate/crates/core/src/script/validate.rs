//! Script validation. Problems are accumulated into a report, never thrown.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use once_cell::sync::Lazy;
use regex::Regex;
use serde::Serialize;

use super::model::*;
use crate::quantify::{ActivityUnit, PeriodUnit};

/// Location used for problems that do not belong to a single question.
pub const SCRIPT_LOCATION: &str = "<script>";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationError {
    pub question_id: String,
    pub message: String,
    pub suggestion: String,
}

impl fmt::Display for ValidationError {
    /// `question_id: message | suggestion`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} | {}", self.question_id, self.message, self.suggestion)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<ValidationError>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn fatal(message: impl Into<String>) -> Self {
        Self {
            errors: vec![ValidationError {
                question_id: SCRIPT_LOCATION.into(),
                message: message.into(),
                suggestion: "fix the JSON structure and validate again".into(),
            }],
        }
    }

    fn push(&mut self, at: &str, message: impl Into<String>, suggestion: impl Into<String>) {
        self.errors.push(ValidationError {
            question_id: at.to_string(),
            message: message.into(),
            suggestion: suggestion.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.errors {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

static UNIT_PHRASE: Lazy<Regex> = Lazy::new(|| {
    Regex::new(
        r"\b(times?|days?|hours?|minutes?|sessions?)[\s-]+(?:a|an|per|each|every|in\s+a)[\s-]+(day|week|month|year)\b",
    )
    .unwrap()
});

fn activity_of(word: &str) -> Option<ActivityUnit> {
    let plural = if word.ends_with('s') {
        word.to_string()
    } else {
        format!("{word}s")
    };
    ActivityUnit::ALL.into_iter().find(|u| u.as_str() == plural)
}

fn period_of(word: &str) -> Option<PeriodUnit> {
    PeriodUnit::ALL.into_iter().find(|u| u.as_str() == word)
}

/// Every `(activity, period)` unit phrase in a prompt, e.g. "days a month".
pub fn unit_phrases(prompt: &str) -> Vec<(ActivityUnit, PeriodUnit)> {
    let lower = prompt.to_lowercase();
    UNIT_PHRASE
        .captures_iter(&lower)
        .filter_map(|c| Some((activity_of(&c[1])?, period_of(&c[2])?)))
        .collect()
}

fn frequency_suggestion(prompt: &str, activity: ActivityUnit, period: PeriodUnit) -> String {
    format!(
        "{} (please answer in {activity} per {period})",
        prompt.trim_end()
    )
}

/// Parses and validates script JSON. A structural parse failure is reported
/// as a single fatal error.
pub fn validate_json(json: &str) -> (Option<InquiryScript>, ValidationReport) {
    match InquiryScript::from_json(json) {
        Ok(script) => {
            let report = validate_script(&script);
            (Some(script), report)
        }
        Err(e) => (None, ValidationReport::fatal(format!("invalid script JSON: {e}"))),
    }
}

pub fn validate_script(script: &InquiryScript) -> ValidationReport {
    let mut report = ValidationReport::default();
    let questions = check_questions(script, &mut report);
    check_rules(script, &questions, &mut report);
    check_cycles(script, &mut report);
    check_pairs(script, &questions, &mut report);
    check_indices(script, &questions, &mut report);
    check_hypotheses(script, &questions, &mut report);
    report
}

fn check_questions<'a>(
    script: &'a InquiryScript,
    report: &mut ValidationReport,
) -> BTreeMap<&'a str, &'a Question> {
    let mut seen = BTreeMap::new();
    if script.questions.is_empty() {
        report.push(SCRIPT_LOCATION, "script has no questions", "add at least one question");
    }
    for q in &script.questions {
        let id = q.question_id.as_str();
        if id.trim().is_empty() {
            report.push(SCRIPT_LOCATION, "question with empty question_id", "give every question a unique id");
            continue;
        }
        if seen.insert(id, q).is_some() {
            report.push(id, "duplicate question_id", "rename one of the questions");
        }
        match &q.response_kind {
            ResponseKind::ObjectiveScale { min, max, labels } => {
                if min >= max {
                    report.push(
                        id,
                        format!("scale min {min} must be below max {max}"),
                        "swap or widen the scale bounds",
                    );
                } else if let Some(labels) = labels {
                    let expected = (max - min + 1) as usize;
                    if labels.len() != expected {
                        report.push(
                            id,
                            format!("scale has {expected} points but {} labels", labels.len()),
                            "provide one label per scale point or omit labels",
                        );
                    }
                }
            }
            ResponseKind::Frequency {
                activity_unit,
                period_unit,
            } => {
                let phrases = unit_phrases(&q.prompt);
                let suggestion = frequency_suggestion(&q.prompt, *activity_unit, *period_unit);
                if phrases.is_empty() {
                    report.push(id, "missing unit phrase", suggestion);
                } else if !phrases.contains(&(*activity_unit, *period_unit)) {
                    let (a, p) = phrases[0];
                    report.push(
                        id,
                        format!(
                            "unit phrase \"{a} per {p}\" does not match declared units {activity_unit} per {period_unit}"
                        ),
                        suggestion,
                    );
                }
            }
            ResponseKind::FreeText | ResponseKind::YesNo => {}
        }
    }
    seen
}

fn range_check(
    report: &mut ValidationReport,
    at: &str,
    q: &Question,
    threshold: f64,
    what: &str,
) {
    match q.response_kind.scale_range() {
        Some((min, max)) if threshold < min as f64 || threshold > max as f64 => report.push(
            at,
            format!("{what} threshold {threshold} outside scale range {min}..{max}"),
            format!("use a threshold between {min} and {max}"),
        ),
        Some(_) => {}
        None => report.push(
            at,
            format!("{what} requires an objective_scale question"),
            "point the condition at a scale question",
        ),
    }
}

fn check_rules(
    script: &InquiryScript,
    questions: &BTreeMap<&str, &Question>,
    report: &mut ValidationReport,
) {
    let mut rule_ids = HashSet::new();
    for rule in &script.branch_rules {
        let rid = &rule.rule_id;
        if !rule_ids.insert(rid.as_str()) {
            report.push(SCRIPT_LOCATION, format!("duplicate rule_id {rid}"), "rename one of the rules");
        }
        if rule.follow_ups.is_empty() {
            report.push(SCRIPT_LOCATION, format!("rule {rid} has no follow-up questions"), "list at least one follow-up question id");
        }
        for f in &rule.follow_ups {
            if !questions.contains_key(f.as_str()) {
                report.push(f, format!("rule {rid} references unknown follow-up question"), "declare the follow-up question in the script");
            }
        }

        let unknown = |id: &str, report: &mut ValidationReport| {
            report.push(id, format!("rule {rid} references unknown question"), "use an existing question_id");
        };
        match &rule.trigger {
            Condition::ScoreBelow {
                question_id,
                threshold,
            }
            | Condition::ScoreAtLeast {
                question_id,
                threshold,
            } => match questions.get(question_id.as_str()) {
                Some(q) => range_check(report, question_id, q, *threshold, &format!("rule {rid}")),
                None => unknown(question_id, report),
            },
            Condition::SentimentBelow {
                question_id,
                threshold,
            } => match questions.get(question_id.as_str()) {
                Some(q) => {
                    if !(-1.0..=1.0).contains(threshold) {
                        report.push(question_id, format!("rule {rid} sentiment threshold {threshold} outside [-1, 1]"), "use a threshold between -1 and 1");
                    }
                    if !q.response_kind.is_textual() {
                        report.push(question_id, format!("rule {rid} reads sentiment from a {} question", q.response_kind.name()), "point the condition at a free_text or frequency question");
                    }
                }
                None => unknown(question_id, report),
            },
            Condition::ContainsEntity { question_id, lemma } => match questions.get(question_id.as_str()) {
                Some(q) => {
                    if lemma.trim().is_empty() {
                        report.push(question_id, format!("rule {rid} has an empty entity lemma"), "name the entity to look for");
                    }
                    if !q.response_kind.is_textual() {
                        report.push(question_id, format!("rule {rid} looks for entities in a {} question", q.response_kind.name()), "point the condition at a free_text or frequency question");
                    }
                }
                None => unknown(question_id, report),
            },
            Condition::AnswerIs { question_id, value } => match questions.get(question_id.as_str()) {
                Some(q) => {
                    let ok = match (&q.response_kind, value) {
                        (ResponseKind::YesNo, ExpectedValue::Bool(_)) => true,
                        (ResponseKind::ObjectiveScale { min, max, .. }, ExpectedValue::Int(v)) => {
                            (min..=max).contains(&v)
                        }
                        (k, ExpectedValue::Text(_)) => k.is_textual(),
                        _ => false,
                    };
                    if !ok {
                        report.push(question_id, format!("rule {rid} compares a {} answer with an incompatible value", q.response_kind.name()), "use true/false for yes_no, an in-range integer for scales, or a string for text");
                    }
                }
                None => unknown(question_id, report),
            },
            Condition::IndexInBand { index_id, band } => match script.index(index_id) {
                Some(def) => {
                    if !def.bands.iter().any(|b| &b.label == band) {
                        report.push(SCRIPT_LOCATION, format!("rule {rid} references unknown band {band:?} of index {index_id}"), format!("use one of: {}", def.bands.iter().map(|b| b.label.as_str()).collect::<Vec<_>>().join(", ")));
                    }
                }
                None => report.push(SCRIPT_LOCATION, format!("rule {rid} references unknown index {index_id}"), "declare the index or fix its id"),
            },
        }
    }
}

/// Reports every branch rule that lies on a cycle of the graph
/// trigger question -> follow-up question.
fn check_cycles(script: &InquiryScript, report: &mut ValidationReport) {
    let mut edges: Vec<(&str, &str, &str)> = Vec::new();
    for rule in &script.branch_rules {
        for from in script.trigger_questions(rule) {
            for to in &rule.follow_ups {
                edges.push((from, to.as_str(), rule.rule_id.as_str()));
            }
        }
    }
    let reaches = |start: &str, target: &str| -> bool {
        let mut stack = vec![start];
        let mut seen = HashSet::new();
        while let Some(n) = stack.pop() {
            if n == target {
                return true;
            }
            if seen.insert(n) {
                stack.extend(edges.iter().filter(|e| e.0 == n).map(|e| e.1));
            }
        }
        false
    };
    let mut cyclic = BTreeSet::new();
    let mut first_question = None;
    for (from, to, rule) in &edges {
        if reaches(to, from) {
            if cyclic.insert(*rule) && first_question.is_none() {
                first_question = Some(*from);
            }
        }
    }
    if let Some(at) = first_question {
        let rules: Vec<_> = script
            .branch_rules
            .iter()
            .map(|r| r.rule_id.as_str())
            .filter(|r| cyclic.contains(r))
            .collect();
        report.push(
            at,
            format!("branch rules form a cycle: {}", rules.join(", ")),
            "remove a follow-up so that no question can re-insert itself",
        );
    }
}

fn check_pairs(
    script: &InquiryScript,
    questions: &BTreeMap<&str, &Question>,
    report: &mut ValidationReport,
) {
    for pair in &script.consistency_pairs {
        let (a, b) = (&pair.question_a, &pair.question_b);
        if a == b {
            report.push(a, "consistency pair uses the same question twice", "pair two different scale questions");
        }
        for id in [a, b] {
            match questions.get(id.as_str()) {
                Some(q) if q.response_kind.scale_range().is_none() => report.push(
                    id,
                    "consistency pair question must be objective_scale",
                    "pair two objective_scale questions",
                ),
                Some(_) => {}
                None => report.push(id, "consistency pair references unknown question", "use an existing question_id"),
            }
        }
    }
}

fn check_indices(
    script: &InquiryScript,
    questions: &BTreeMap<&str, &Question>,
    report: &mut ValidationReport,
) {
    let mut ids = HashSet::new();
    for def in &script.indices {
        let iid = &def.index_id;
        if !ids.insert(iid.as_str()) {
            report.push(SCRIPT_LOCATION, format!("duplicate index_id {iid}"), "rename one of the indices");
        }
        if def.item_question_ids.is_empty() {
            report.push(SCRIPT_LOCATION, format!("index {iid} has no items"), "list the item question ids");
        }
        if def.item_polarity.len() != def.item_question_ids.len() {
            report.push(
                SCRIPT_LOCATION,
                format!(
                    "index {iid} has {} items but {} polarities",
                    def.item_question_ids.len(),
                    def.item_polarity.len()
                ),
                "give one polarity (1 or -1) per item",
            );
        }
        let mut raw_lo = 0.0;
        let mut raw_hi = 0.0;
        let mut complete = true;
        for id in &def.item_question_ids {
            match questions.get(id.as_str()).and_then(|q| q.response_kind.scale_range()) {
                Some((min, max)) => {
                    raw_lo += min as f64;
                    raw_hi += max as f64;
                }
                None => {
                    complete = false;
                    let msg = if questions.contains_key(id.as_str()) {
                        format!("index {iid} item must be objective_scale")
                    } else {
                        format!("index {iid} references unknown question")
                    };
                    report.push(id, msg, "use objective_scale item questions");
                }
            }
        }
        if !def.transform.scale.is_finite() || def.transform.scale == 0.0 || !def.transform.offset.is_finite() {
            report.push(SCRIPT_LOCATION, format!("index {iid} transform must have a finite non-zero scale"), "use e.g. {\"scale\": 1, \"offset\": 0}");
            continue;
        }
        if def.bands.is_empty() {
            report.push(SCRIPT_LOCATION, format!("index {iid} has no bands"), "declare at least one band covering the score range");
            continue;
        }
        if def.bands.windows(2).any(|w| w[0].upper >= w[1].upper) {
            report.push(SCRIPT_LOCATION, format!("index {iid} band upper bounds must strictly increase"), "order bands from lowest to highest upper bound");
        }
        if complete && !def.item_question_ids.is_empty() {
            let a = def.transform.apply(raw_lo);
            let b = def.transform.apply(raw_hi);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let last = def.bands.last().map(|b| b.upper).unwrap_or(f64::NEG_INFINITY);
            if last < hi {
                report.push(
                    SCRIPT_LOCATION,
                    format!("index {iid} bands end at {last} but scores reach {hi}"),
                    format!("raise the last band's upper bound to at least {hi}"),
                );
            }
            if def.bands[0].upper < lo {
                report.push(
                    SCRIPT_LOCATION,
                    format!("index {iid} band {:?} lies below the lowest score {lo}", def.bands[0].label),
                    "remove bands that no score can fall into",
                );
            }
        }
    }
}

fn check_hypotheses(
    script: &InquiryScript,
    questions: &BTreeMap<&str, &Question>,
    report: &mut ValidationReport,
) {
    let mut ids = HashSet::new();
    for h in &script.hypotheses {
        let hid = &h.hypothesis_id;
        if !ids.insert(hid.as_str()) {
            report.push(SCRIPT_LOCATION, format!("duplicate hypothesis_id {hid}"), "rename one of the hypotheses");
        }
        let qid = h.test.question_id();
        let Some(q) = questions.get(qid) else {
            report.push(qid, format!("hypothesis {hid} references unknown question"), "use an existing question_id");
            continue;
        };
        match &h.test {
            HypothesisTest::ProportionTest { success, null_p0, .. } => {
                if !(*null_p0 > 0.0 && *null_p0 < 1.0) {
                    report.push(qid, format!("hypothesis {hid} null_p0 {null_p0} must lie strictly inside (0, 1)"), "use a null proportion such as 0.5");
                }
                if !success.accepts(&q.response_kind) {
                    report.push(qid, format!("hypothesis {hid} predicate cannot be applied to a {} question", q.response_kind.name()), "choose a predicate matching the question kind");
                }
            }
            HypothesisTest::MeanTest { null_mu0, .. } => {
                if !null_mu0.is_finite() {
                    report.push(qid, format!("hypothesis {hid} null_mu0 must be finite"), "use a finite null mean");
                }
                if !matches!(q.response_kind, ResponseKind::ObjectiveScale { .. } | ResponseKind::Frequency { .. }) {
                    report.push(qid, format!("hypothesis {hid} mean test needs numeric answers, got {}", q.response_kind.name()), "use a scale or frequency question");
                }
            }
        }
    }
}
