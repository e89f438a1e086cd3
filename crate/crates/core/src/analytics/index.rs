//! Clinical index scoring (WHO-5, MHI-5, PHQ-9 and friends).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::script::{Answers, IndexDefinition, InquiryScript, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("index {index_id} incomplete, missing: {}", missing.join(", "))]
    Incomplete {
        index_id: String,
        missing: Vec<String>,
    },
    #[error("index {index_id} item {question_id} is not a scale question")]
    NotScale {
        index_id: String,
        question_id: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexValue {
    pub raw_sum: f64,
    pub transformed: f64,
    pub band: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexScore {
    pub session_id: String,
    pub index_id: String,
    pub raw_sum: f64,
    pub transformed: f64,
    pub band: Option<String>,
}

/// Sums polarity-adjusted items (a reversed item contributes
/// `min + max - value`), applies the affine transform and picks the band.
pub fn compute_index(
    script: &InquiryScript,
    def: &IndexDefinition,
    answers: &Answers,
) -> Result<IndexValue, IndexError> {
    let mut missing = Vec::new();
    let mut raw = 0i64;
    for (i, qid) in def.item_question_ids.iter().enumerate() {
        let (min, max) = script
            .question(qid)
            .and_then(|q| q.response_kind.scale_range())
            .ok_or_else(|| IndexError::NotScale {
                index_id: def.index_id.clone(),
                question_id: qid.clone(),
            })?;
        match answers.get(qid).and_then(|a| a.value.as_scale()) {
            Some(v) => {
                raw += match def.item_polarity.get(i).copied().unwrap_or(Sign::Positive) {
                    Sign::Positive => v,
                    Sign::Negative => min + max - v,
                }
            }
            None => missing.push(qid.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(IndexError::Incomplete {
            index_id: def.index_id.clone(),
            missing,
        });
    }
    let raw_sum = raw as f64;
    let transformed = def.transform.apply(raw_sum);
    Ok(IndexValue {
        raw_sum,
        transformed,
        band: def.band_for(transformed).map(|b| b.label.clone()),
    })
}

pub fn score_index(
    session_id: &str,
    script: &InquiryScript,
    answers: &Answers,
    def: &IndexDefinition,
) -> Result<IndexScore, IndexError> {
    let v = compute_index(script, def, answers)?;
    Ok(IndexScore {
        session_id: session_id.to_string(),
        index_id: def.index_id.clone(),
        raw_sum: v.raw_sum,
        transformed: v.transformed,
        band: v.band,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::answer::{Answer, AnswerValue};
    use crate::script::example_script;

    fn answers_for(script: &InquiryScript, index: &str, values: &[i64]) -> Answers {
        let def = script.index(index).unwrap();
        def.item_question_ids
            .iter()
            .zip(values)
            .map(|(q, v)| (q.clone(), Answer::new(q.clone(), AnswerValue::Scale(*v))))
            .collect()
    }

    #[test]
    fn who5_floor_and_ceiling() {
        let s = example_script();
        let def = s.index("WHO5").unwrap();
        let floor = compute_index(&s, def, &answers_for(&s, "WHO5", &[0; 5])).unwrap();
        assert_eq!(floor.transformed, 0.0);
        assert_eq!(floor.band.as_deref(), Some("poor"));
        let ceil = compute_index(&s, def, &answers_for(&s, "WHO5", &[5; 5])).unwrap();
        assert_eq!(ceil.transformed, 100.0);
        assert_eq!(ceil.band.as_deref(), Some("adequate"));
    }

    #[test]
    fn mhi5_reversed_items() {
        let s = example_script();
        let def = s.index("MHI5").unwrap();
        // best mental health: negative items "none of the time", positive "all of the time"
        let best = compute_index(&s, def, &answers_for(&s, "MHI5", &[1, 1, 6, 1, 6])).unwrap();
        assert_eq!(best.raw_sum, 30.0);
        assert_eq!(best.transformed, 100.0);
        let worst = compute_index(&s, def, &answers_for(&s, "MHI5", &[6, 6, 1, 6, 1])).unwrap();
        assert_eq!(worst.transformed, 0.0);
    }

    #[test]
    fn missing_items_listed() {
        let s = example_script();
        let def = s.index("WHO5").unwrap();
        let err = compute_index(&s, def, &answers_for(&s, "WHO5", &[3, 3])).unwrap_err();
        assert_eq!(
            err,
            IndexError::Incomplete {
                index_id: "WHO5".into(),
                missing: vec!["WHO5_Q3".into(), "WHO5_Q4".into(), "WHO5_Q5".into()],
            }
        );
    }
}
