//! Response-consistency checks over paired index questions.
//!
//! A single respondent gives one observation per question, so a
//! per-respondent Pearson coefficient is undefined. Each respondent instead
//! gets a consistency index: the mean over pairs of
//! `expected_sign * z(a) * z(b)`, where `z` is the cohort z-score of the
//! respondent's answer. A positive index means the respondent's answers move
//! in the expected direction relative to the cohort.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::stats::{pearson, StatsError};
use crate::script::{ConsistencyPair, Sign};
use crate::session::ExportRecord;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairCorrelation {
    pub question_a: String,
    pub question_b: String,
    pub expected_sign: Sign,
    pub n: usize,
    pub r: Option<f64>,
    pub sign_matches: Option<bool>,
    /// Why the pair was left out of the per-session index.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excluded: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Inconsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConsistency {
    pub session_id: String,
    pub consistency_index: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub pairs: Vec<PairCorrelation>,
    /// Per-session verdicts. Kept out of serialized reports, which are
    /// aggregate-only.
    #[serde(skip_serializing, default)]
    pub sessions: Vec<SessionConsistency>,
    pub evaluated_sessions: usize,
    pub consistent_sessions: usize,
    pub consistent_fraction: Option<f64>,
}

/// Mean and population standard deviation, summed in sorted order so the
/// result does not depend on session order.
fn moments(values: &[f64]) -> (f64, f64) {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let mut dev: Vec<f64> = sorted.iter().map(|v| (v - mean).powi(2)).collect();
    dev.sort_by(f64::total_cmp);
    (mean, (dev.iter().sum::<f64>() / n).sqrt())
}

pub fn consistency_report(sessions: &[ExportRecord], pairs: &[ConsistencyPair]) -> ConsistencyReport {
    let scale = |s: &ExportRecord, q: &str| s.answers.get(q).and_then(|a| a.value.as_scale());

    let mut eligible: Vec<&ExportRecord> = sessions
        .iter()
        .filter(|s| {
            pairs
                .iter()
                .all(|p| scale(s, &p.question_a).is_some() && scale(s, &p.question_b).is_some())
        })
        .collect();
    eligible.sort_by(|a, b| a.session_id.cmp(&b.session_id));

    let mut pair_rows = Vec::with_capacity(pairs.len());
    let mut usable = Vec::new();
    for p in pairs {
        let xs: Vec<f64> = eligible.iter().map(|s| scale(s, &p.question_a).unwrap() as f64).collect();
        let ys: Vec<f64> = eligible.iter().map(|s| scale(s, &p.question_b).unwrap() as f64).collect();
        let (r, excluded) = match pearson(&xs, &ys) {
            Ok(r) => (Some(r), None),
            Err(StatsError::ZeroVariance) => (None, Some("zero variance".to_string())),
            Err(e) => (None, Some(e.to_string())),
        };
        if excluded.is_none() {
            usable.push(p);
        }
        pair_rows.push(PairCorrelation {
            question_a: p.question_a.clone(),
            question_b: p.question_b.clone(),
            expected_sign: p.expected_sign,
            n: xs.len(),
            r,
            sign_matches: r.map(|r| r * p.expected_sign.value() > 0.0),
            excluded,
        });
    }

    let mut z_params: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for p in &usable {
        for q in [p.question_a.as_str(), p.question_b.as_str()] {
            z_params.entry(q).or_insert_with(|| {
                let values: Vec<f64> = eligible.iter().map(|s| scale(s, q).unwrap() as f64).collect();
                moments(&values)
            });
        }
    }
    let z = |s: &ExportRecord, q: &str| {
        let (m, sd) = z_params[q];
        (scale(s, q).unwrap() as f64 - m) / sd
    };

    let mut verdicts = Vec::new();
    if !usable.is_empty() {
        for s in &eligible {
            let index = usable
                .iter()
                .map(|p| p.expected_sign.value() * z(s, &p.question_a) * z(s, &p.question_b))
                .sum::<f64>()
                / usable.len() as f64;
            verdicts.push(SessionConsistency {
                session_id: s.session_id.clone(),
                consistency_index: index,
                verdict: if index > 0.0 {
                    Verdict::Consistent
                } else {
                    Verdict::Inconsistent
                },
            });
        }
    }
    let consistent = verdicts
        .iter()
        .filter(|v| v.verdict == Verdict::Consistent)
        .count();
    ConsistencyReport {
        pairs: pair_rows,
        evaluated_sessions: verdicts.len(),
        consistent_sessions: consistent,
        consistent_fraction: (!verdicts.is_empty())
            .then(|| consistent as f64 / verdicts.len() as f64),
        sessions: verdicts,
    }
}
