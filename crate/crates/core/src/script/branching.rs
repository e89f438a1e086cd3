//! Branch-rule evaluation and question ordering.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::model::{Condition, ExpectedValue, InquiryScript};
use crate::analytics::index::compute_index;
use crate::answer::{Answer, AnswerValue};

pub type Answers = BTreeMap<String, Answer>;

/// Remaining questions plus the rules whose conditions became true for the
/// first time in this evaluation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Plan {
    pub pending: Vec<String>,
    pub newly_fired: Vec<String>,
}

pub fn condition_holds(script: &InquiryScript, condition: &Condition, answers: &Answers) -> bool {
    match condition {
        Condition::ScoreBelow {
            question_id,
            threshold,
        } => scale(answers, question_id).is_some_and(|v| (v as f64) < *threshold),
        Condition::ScoreAtLeast {
            question_id,
            threshold,
        } => scale(answers, question_id).is_some_and(|v| (v as f64) >= *threshold),
        Condition::IndexInBand { index_id, band } => script
            .index(index_id)
            .and_then(|def| compute_index(script, def, answers).ok())
            .is_some_and(|v| v.band.as_deref() == Some(band.as_str())),
        Condition::AnswerIs { question_id, value } => {
            answers
                .get(question_id)
                .is_some_and(|a| match (&a.value, value) {
                    (AnswerValue::YesNo(x), ExpectedValue::Bool(y)) => x == y,
                    (AnswerValue::Scale(x), ExpectedValue::Int(y)) => x == y,
                    (AnswerValue::Text(x), ExpectedValue::Text(y)) => {
                        x.trim().eq_ignore_ascii_case(y.trim())
                    }
                    _ => false,
                })
        }
        Condition::ContainsEntity { question_id, lemma } => answers
            .get(question_id)
            .is_some_and(|a| a.mentions_lemma(lemma)),
        Condition::SentimentBelow {
            question_id,
            threshold,
        } => answers
            .get(question_id)
            .and_then(Answer::sentiment_score)
            .is_some_and(|s| s < *threshold),
    }
}

fn scale(answers: &Answers, id: &str) -> Option<i64> {
    answers.get(id).and_then(|a| a.value.as_scale())
}

/// Walks base questions in script order. An unanswered question is pending;
/// an answered one expands, in declaration order, the follow-ups of every
/// rule anchored on it that has fired before or holds now. Each question is
/// visited at most once, so the walk terminates even if two rules share a
/// follow-up.
pub fn plan(script: &InquiryScript, answers: &Answers, fired: &BTreeSet<String>) -> Plan {
    let mut anchored: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, rule) in script.branch_rules.iter().enumerate() {
        if let Some(anchor) = script.rule_anchor(rule) {
            anchored.entry(anchor).or_default().push(i);
        }
    }

    struct Walk<'a> {
        script: &'a InquiryScript,
        answers: &'a Answers,
        fired: &'a BTreeSet<String>,
        anchored: HashMap<&'a str, Vec<usize>>,
        visited: HashSet<&'a str>,
        plan: Plan,
    }

    impl<'a> Walk<'a> {
        fn visit(&mut self, id: &'a str) {
            if !self.visited.insert(id) {
                return;
            }
            if !self.answers.contains_key(id) {
                self.plan.pending.push(id.to_string());
                return;
            }
            let script: &'a InquiryScript = self.script;
            let rules = self.anchored.get(id).cloned().unwrap_or_default();
            for i in rules {
                let rule = &script.branch_rules[i];
                let active = if self.fired.contains(&rule.rule_id) {
                    true
                } else if condition_holds(script, &rule.trigger, self.answers) {
                    self.plan.newly_fired.push(rule.rule_id.clone());
                    true
                } else {
                    false
                };
                if active {
                    for f in &rule.follow_ups {
                        self.visit(f);
                    }
                }
            }
        }
    }

    let mut walk = Walk {
        script,
        answers,
        fired,
        anchored,
        visited: HashSet::new(),
        plan: Plan::default(),
    };
    for id in script.base_question_ids() {
        walk.visit(id);
    }
    walk.plan
}

/// Remaining question ids in delivery order; empty when the session is done.
pub fn next_question_ids(
    script: &InquiryScript,
    answers: &Answers,
    fired: &BTreeSet<String>,
) -> Vec<String> {
    plan(script, answers, fired).pending
}
