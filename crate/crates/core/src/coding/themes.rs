use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Codebook, Response};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThemeMode {
    Deductive,
    Inductive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub lemma: String,
    /// Char offsets of every mention of the lemma in the response.
    pub spans: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThemeAssignment {
    pub session_id: String,
    pub question_id: String,
    pub theme: String,
    pub evidence: Vec<Evidence>,
    pub mode: ThemeMode,
}

/// Codebook themes. A response gets a theme when one of its entity lemmas is
/// a trigger; with overlapping triggers the lemma goes to the
/// highest-priority theme only.
pub fn code_themes_deductive(responses: &[Response], codebook: &Codebook) -> Vec<ThemeAssignment> {
    let mut out = Vec::new();
    for r in responses {
        let mut by_theme: BTreeMap<&str, Vec<Evidence>> = BTreeMap::new();
        for e in r.entities() {
            if let Some(theme) = codebook.theme_for(&e.lemma) {
                by_theme.entry(theme).or_default().push(Evidence {
                    lemma: e.lemma.clone(),
                    spans: e.mentions.clone(),
                });
            }
        }
        for (theme, _) in &codebook.themes {
            if let Some(evidence) = by_theme.remove(theme.as_str()) {
                out.push(ThemeAssignment {
                    session_id: r.session_id.clone(),
                    question_id: r.answer.question_id.clone(),
                    theme: theme.clone(),
                    evidence,
                    mode: ThemeMode::Deductive,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmergentTheme {
    pub label: String,
    pub members: Vec<String>,
    /// Responses mentioning at least one member.
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InductiveThemes {
    pub themes: BTreeMap<String, EmergentTheme>,
    pub assignments: Vec<ThemeAssignment>,
}

fn jaccard(a: &BTreeSet<usize>, b: &BTreeSet<usize>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Emergent themes. Candidate lemmas are entity lemmas mentioned in at least
/// `min_support` responses; two candidates join the same theme when the
/// Jaccard overlap of their response sets reaches `jaccard_threshold`
/// (single linkage). A theme is labelled by its most frequent member, ties
/// broken lexicographically.
pub fn code_themes_inductive(
    responses: &[Response],
    min_support: usize,
    jaccard_threshold: f64,
) -> InductiveThemes {
    // Response identity is (session, question) so the result does not depend
    // on input order.
    let keys: BTreeSet<(&str, &str)> = responses
        .iter()
        .map(|r| (r.session_id.as_str(), r.answer.question_id.as_str()))
        .collect();
    let key_index: BTreeMap<(&str, &str), usize> =
        keys.iter().enumerate().map(|(i, k)| (*k, i)).collect();

    let mut docs: BTreeMap<&str, BTreeSet<usize>> = BTreeMap::new();
    for r in responses {
        let id = key_index[&(r.session_id.as_str(), r.answer.question_id.as_str())];
        for e in r.entities() {
            docs.entry(e.lemma.as_str()).or_default().insert(id);
        }
    }
    let candidates: Vec<(&str, &BTreeSet<usize>)> = docs
        .iter()
        .filter(|(_, d)| d.len() >= min_support.max(1))
        .map(|(l, d)| (*l, d))
        .collect();

    let mut parent: Vec<usize> = (0..candidates.len()).collect();
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            if jaccard(candidates[i].1, candidates[j].1) >= jaccard_threshold {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..candidates.len() {
        let root = find(&mut parent, i);
        clusters.entry(root).or_default().push(i);
    }

    let mut themes = BTreeMap::new();
    let mut lemma_theme: BTreeMap<&str, String> = BTreeMap::new();
    for members in clusters.values() {
        let label = members
            .iter()
            .map(|&i| candidates[i])
            .max_by(|a, b| a.1.len().cmp(&b.1.len()).then(b.0.cmp(a.0)))
            .map(|(l, _)| l.to_string())
            .expect("clusters are non-empty");
        let support: BTreeSet<usize> = members
            .iter()
            .flat_map(|&i| candidates[i].1.iter().copied())
            .collect();
        for &i in members {
            lemma_theme.insert(candidates[i].0, label.clone());
        }
        themes.insert(
            label.clone(),
            EmergentTheme {
                label,
                members: members.iter().map(|&i| candidates[i].0.to_string()).collect(),
                support: support.len(),
            },
        );
    }

    let mut assignments = Vec::new();
    for r in responses {
        let mut by_theme: BTreeMap<&str, Vec<Evidence>> = BTreeMap::new();
        for e in r.entities() {
            if let Some(theme) = lemma_theme.get(e.lemma.as_str()) {
                by_theme.entry(theme).or_default().push(Evidence {
                    lemma: e.lemma.clone(),
                    spans: e.mentions.clone(),
                });
            }
        }
        for (theme, evidence) in by_theme {
            assignments.push(ThemeAssignment {
                session_id: r.session_id.clone(),
                question_id: r.answer.question_id.clone(),
                theme: theme.to_string(),
                evidence,
                mode: ThemeMode::Inductive,
            });
        }
    }
    InductiveThemes {
        themes,
        assignments,
    }
}
