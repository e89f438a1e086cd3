use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coding::Response;
use crate::text::is_stopword;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCount {
    pub lemma: String,
    pub count: usize,
}

/// Entity lemma mention counts, most frequent first, ties in lexicographic
/// order. Input for word clouds.
pub fn term_frequency_export(responses: &[Response]) -> Vec<TermCount> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in responses {
        for e in r.entities() {
            if is_stopword(&e.lemma) {
                continue;
            }
            *counts.entry(e.lemma.as_str()).or_default() += e.mentions.len().max(1);
        }
    }
    let mut out: Vec<TermCount> = counts
        .into_iter()
        .map(|(lemma, count)| TermCount {
            lemma: lemma.to_string(),
            count,
        })
        .collect();
    out.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.lemma.cmp(&b.lemma)));
    out
}
