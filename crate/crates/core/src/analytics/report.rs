//! The aggregate analytics report. It never contains session ids or text.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::consistency::{consistency_report, ConsistencyReport};
use super::distribution::{distribution, BinSpec, Distribution};
use super::index::compute_index;
use super::terms::{term_frequency_export, TermCount};
use super::testing::{mean_test, proportion_test, TestResult, DEFAULT_ALPHA};
use crate::coding::{code_emotion, code_hypothesis, code_themes_deductive, responses_from, Codebook};
use crate::script::{HypothesisTest, InquiryScript, ResponseKind};
use crate::session::ExportRecord;

/// Bins used for sentiment scores and per-day rates.
const CONTINUOUS_BINS: usize = 10;

#[derive(Debug, Clone)]
pub struct ReportOptions {
    pub alpha: f64,
    pub codebook: Codebook,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            codebook: Codebook::bundled(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexSummary {
    pub scored: usize,
    pub incomplete: usize,
    pub bands: BTreeMap<String, usize>,
    pub distribution: Option<Distribution>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisOutcome {
    pub hypothesis_id: String,
    pub statement: String,
    pub question_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<String>,
    pub supports: usize,
    pub refutes: usize,
    pub not_applicable: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<TestResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticsReport {
    pub script_id: String,
    pub alpha: f64,
    pub sessions: BTreeMap<String, usize>,
    pub indices: BTreeMap<String, IndexSummary>,
    pub consistency: ConsistencyReport,
    /// Scale answers, per-day rates of frequency answers, and sentiment
    /// scores of text answers, keyed by question id.
    pub distributions: BTreeMap<String, Distribution>,
    pub emotions: BTreeMap<String, BTreeMap<String, usize>>,
    pub themes: BTreeMap<String, usize>,
    pub hypotheses: Vec<HypothesisOutcome>,
    pub term_frequencies: Vec<TermCount>,
}

fn question_values(script: &InquiryScript, records: &[ExportRecord], qid: &str) -> (Vec<f64>, BinSpec) {
    let kind = script.question(qid).map(|q| &q.response_kind);
    let answers = records.iter().filter_map(|r| r.answers.get(qid));
    match kind {
        Some(ResponseKind::ObjectiveScale { .. }) => (
            answers.filter_map(|a| a.value.as_scale()).map(|v| v as f64).collect(),
            BinSpec::Distinct,
        ),
        Some(ResponseKind::Frequency { .. }) => (
            answers.filter_map(|a| a.per_day_rate()).collect(),
            BinSpec::Uniform {
                count: CONTINUOUS_BINS,
            },
        ),
        Some(ResponseKind::FreeText) => (
            answers.filter_map(|a| a.sentiment_score()).collect(),
            BinSpec::Uniform {
                count: CONTINUOUS_BINS,
            },
        ),
        Some(ResponseKind::YesNo) => (
            answers
                .filter_map(|a| a.value.as_yes_no())
                .map(|b| if b { 1.0 } else { 0.0 })
                .collect(),
            BinSpec::Distinct,
        ),
        None => (Vec::new(), BinSpec::Distinct),
    }
}

/// Builds the report over the sessions of one script. Records for other
/// scripts are ignored; order of `records` does not matter.
pub fn build_report(script: &InquiryScript, records: &[ExportRecord], options: &ReportOptions) -> AnalyticsReport {
    let mut records: Vec<ExportRecord> = records
        .iter()
        .filter(|r| r.script_id == script.script_id)
        .cloned()
        .collect();
    records.sort_by(|a, b| a.session_id.cmp(&b.session_id));

    let mut sessions = BTreeMap::new();
    for status in ["active", "completed", "abandoned"] {
        sessions.insert(status.to_string(), 0);
    }
    for r in &records {
        *sessions.entry(r.status.as_str().to_string()).or_default() += 1;
    }
    sessions.insert("total".to_string(), records.len());

    let mut indices = BTreeMap::new();
    for def in &script.indices {
        let mut values = Vec::new();
        let mut bands: BTreeMap<String, usize> = def.bands.iter().map(|b| (b.label.clone(), 0)).collect();
        let mut incomplete = 0;
        for r in &records {
            match compute_index(script, def, &r.answers) {
                Ok(v) => {
                    values.push(v.transformed);
                    if let Some(b) = v.band {
                        *bands.entry(b).or_default() += 1;
                    }
                }
                Err(_) => incomplete += 1,
            }
        }
        indices.insert(
            def.index_id.clone(),
            IndexSummary {
                scored: values.len(),
                incomplete,
                bands,
                distribution: distribution(
                    &def.index_id,
                    &values,
                    &BinSpec::Uniform {
                        count: CONTINUOUS_BINS,
                    },
                ),
            },
        );
    }

    let mut distributions = BTreeMap::new();
    for q in &script.questions {
        let (values, spec) = question_values(script, &records, &q.question_id);
        if let Some(d) = distribution(&q.question_id, &values, &spec) {
            distributions.insert(q.question_id.clone(), d);
        }
    }

    let responses = responses_from(&records, None);
    let mut emotions: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    for r in &responses {
        if let Some(code) = code_emotion(r, &options.codebook) {
            *emotions
                .entry(code.question_id)
                .or_default()
                .entry(code.label.as_str().to_string())
                .or_default() += 1;
        }
    }
    let mut themes: BTreeMap<String, usize> = BTreeMap::new();
    for a in code_themes_deductive(&responses, &options.codebook) {
        *themes.entry(a.theme).or_default() += 1;
    }

    let hypotheses = script
        .hypotheses
        .iter()
        .map(|h| {
            let qid = h.test.question_id().to_string();
            let mut outcome = HypothesisOutcome {
                hypothesis_id: h.hypothesis_id.clone(),
                statement: h.statement.clone(),
                question_id: qid.clone(),
                predicate: None,
                supports: 0,
                refutes: 0,
                not_applicable: 0,
                result: None,
                error: None,
            };
            let test = match &h.test {
                HypothesisTest::ProportionTest { null_p0, tail, .. } => {
                    let subset = responses_from(&records, Some(&qid));
                    match code_hypothesis(script, &subset, h) {
                        Ok(c) => {
                            outcome.predicate = Some(c.predicate.clone());
                            outcome.supports = c.supports;
                            outcome.refutes = c.refutes;
                            outcome.not_applicable = c.not_applicable;
                            proportion_test(
                                &h.hypothesis_id,
                                c.supports,
                                c.supports + c.refutes,
                                *null_p0,
                                *tail,
                                options.alpha,
                            )
                            .map_err(|e| e.to_string())
                        }
                        Err(e) => Err(e.to_string()),
                    }
                }
                HypothesisTest::MeanTest { null_mu0, tail, .. } => {
                    let (sample, _) = question_values(script, &records, &qid);
                    mean_test(&h.hypothesis_id, &sample, *null_mu0, *tail, options.alpha)
                        .map_err(|e| e.to_string())
                }
            };
            match test {
                Ok(t) => outcome.result = Some(t),
                Err(e) => outcome.error = Some(e),
            }
            outcome
        })
        .collect();

    AnalyticsReport {
        script_id: script.script_id.clone(),
        alpha: options.alpha,
        sessions,
        indices,
        consistency: consistency_report(&records, &script.consistency_pairs),
        distributions,
        emotions,
        themes,
        hypotheses,
        term_frequencies: term_frequency_export(&responses),
    }
}

impl AnalyticsReport {
    /// Pretty JSON with a trailing newline; the canonical byte form shared
    /// by the HTTP endpoint and the CLI.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    /// Flat tables for plotting tools, as (file stem, CSV text) pairs.
    pub fn to_csv_tables(&self) -> Vec<(String, String)> {
        fn table(header: &[&str], rows: Vec<Vec<String>>) -> String {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(header).expect("in-memory write");
            for r in rows {
                w.write_record(&r).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
        }
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();

        let indices = self
            .indices
            .iter()
            .flat_map(|(id, s)| {
                s.bands
                    .iter()
                    .map(move |(band, n)| vec![id.clone(), band.clone(), n.to_string()])
            })
            .collect();
        let distributions = self
            .distributions
            .values()
            .chain(self.indices.values().filter_map(|s| s.distribution.as_ref()))
            .flat_map(|d| {
                d.bins.iter().zip(&d.cdf).map(move |(b, c)| {
                    vec![d.variable.clone(), b.upper.to_string(), b.count.to_string(), c.to_string()]
                })
            })
            .collect();
        let consistency = self
            .consistency
            .pairs
            .iter()
            .map(|p| {
                vec![
                    p.question_a.clone(),
                    p.question_b.clone(),
                    p.expected_sign.value().to_string(),
                    p.n.to_string(),
                    opt(p.r),
                    p.sign_matches.map(|b| b.to_string()).unwrap_or_default(),
                    p.excluded.clone().unwrap_or_default(),
                ]
            })
            .collect();
        let tests = self
            .hypotheses
            .iter()
            .map(|h| {
                let r = h.result.as_ref();
                vec![
                    h.hypothesis_id.clone(),
                    h.supports.to_string(),
                    h.refutes.to_string(),
                    h.not_applicable.to_string(),
                    opt(r.map(|r| r.statistic)),
                    opt(r.map(|r| r.p_value)),
                    r.map(|r| serde_json::to_value(r.decision).unwrap().as_str().unwrap().to_string())
                        .unwrap_or_default(),
                ]
            })
            .collect();
        let terms = self
            .term_frequencies
            .iter()
            .map(|t| vec![t.lemma.clone(), t.count.to_string()])
            .collect();
        vec![
            ("indices".into(), table(&["index_id", "band", "count"], indices)),
            (
                "distributions".into(),
                table(&["variable", "upper", "count", "cdf"], distributions),
            ),
            (
                "consistency".into(),
                table(
                    &["question_a", "question_b", "expected_sign", "n", "r", "sign_matches", "excluded"],
                    consistency,
                ),
            ),
            (
                "tests".into(),
                table(
                    &["hypothesis_id", "supports", "refutes", "not_applicable", "statistic", "p_value", "decision"],
                    tests,
                ),
            ),
            ("terms".into(), table(&["lemma", "count"], terms)),
        ]
    }
}
