//! Checks persisted bytes for personal information that slipped through.

use serde::Serialize;
use serde_json::Value;

use super::scrub::{find_phones, PiiKind, EMAIL};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub line: usize,
    pub kind: PiiKind,
    pub excerpt: String,
}

fn string_leaves<'a>(v: &'a Value, out: &mut Vec<&'a str>) {
    match v {
        Value::String(s) => out.push(s),
        Value::Array(a) => a.iter().for_each(|x| string_leaves(x, out)),
        Value::Object(o) => o.iter().for_each(|(k, x)| {
            out.push(k);
            string_leaves(x, out)
        }),
        _ => {}
    }
}

/// Scans NDJSON content. Email addresses are searched in the raw bytes.
/// Phone numbers are searched in JSON string values and keys: JSON numbers
/// are offsets, rates and scores, never respondent text.
pub fn audit_ndjson(content: &str) -> Vec<Finding> {
    let mut findings = Vec::new();
    for (i, line) in content.lines().enumerate() {
        for m in EMAIL.find_iter(line) {
            findings.push(Finding {
                line: i + 1,
                kind: PiiKind::Email,
                excerpt: m.as_str().to_string(),
            });
        }
        let texts: Vec<String> = match serde_json::from_str::<Value>(line) {
            Ok(v) => {
                let mut leaves = Vec::new();
                string_leaves(&v, &mut leaves);
                leaves.into_iter().map(str::to_string).collect()
            }
            // unparseable lines are checked whole
            Err(_) => vec![line.to_string()],
        };
        for t in texts {
            for (s, e) in find_phones(&t) {
                findings.push(Finding {
                    line: i + 1,
                    kind: PiiKind::Phone,
                    excerpt: crate::text::slice_chars(&t, s, e),
                });
            }
        }
    }
    findings
}
