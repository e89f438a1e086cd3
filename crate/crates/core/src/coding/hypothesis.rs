use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Response;
use crate::answer::Answer;
use crate::script::{HypothesisDefinition, HypothesisTest, InquiryScript, SuccessPredicate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypothesisCodingError {
    #[error("hypothesis {hypothesis_id} references unknown question {question_id}")]
    UnknownQuestion {
        hypothesis_id: String,
        question_id: String,
    },
    #[error("hypothesis {hypothesis_id}: predicate {predicate} does not apply to {kind} question {question_id}")]
    WrongKind {
        hypothesis_id: String,
        question_id: String,
        predicate: String,
        kind: String,
    },
    #[error("hypothesis {hypothesis_id} is a mean test and has no per-response predicate")]
    NotAProportion { hypothesis_id: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Supports,
    Refutes,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseVerdict {
    pub session_id: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCoding {
    pub hypothesis_id: String,
    pub question_id: String,
    pub predicate: String,
    pub verdicts: Vec<ResponseVerdict>,
    pub supports: usize,
    pub refutes: usize,
    pub not_applicable: usize,
}

/// `None` when the answer cannot be judged (wrong type or nothing was
/// quantified).
pub fn evaluate(predicate: &SuccessPredicate, answer: &Answer) -> Option<bool> {
    Some(match predicate {
        SuccessPredicate::YesNoIs { value } => answer.value.as_yes_no()? == *value,
        SuccessPredicate::ScaleAtLeast { value } => answer.value.as_scale()? >= *value,
        SuccessPredicate::ScaleAtMost { value } => answer.value.as_scale()? <= *value,
        SuccessPredicate::ContainsEntity { lemma } => {
            answer.value.as_text()?;
            answer.mentions_lemma(lemma)
        }
        SuccessPredicate::SentimentBelow { threshold } => answer.sentiment_score()? < *threshold,
        SuccessPredicate::FrequencyAtLeast { per_day } => answer.per_day_rate()? >= *per_day,
        SuccessPredicate::FrequencyAtMost { per_day } => answer.per_day_rate()? <= *per_day,
    })
}

/// Tags each response as supporting or refuting the hypothesis predicate.
/// Responses to other questions, or that cannot be judged, count as not
/// applicable, so the three tallies always sum to the response count.
pub fn code_hypothesis(
    script: &InquiryScript,
    responses: &[Response],
    hypothesis: &HypothesisDefinition,
) -> Result<HypothesisCoding, HypothesisCodingError> {
    let HypothesisTest::ProportionTest {
        question_id,
        success,
        ..
    } = &hypothesis.test
    else {
        return Err(HypothesisCodingError::NotAProportion {
            hypothesis_id: hypothesis.hypothesis_id.clone(),
        });
    };
    let question = script
        .question(question_id)
        .ok_or_else(|| HypothesisCodingError::UnknownQuestion {
            hypothesis_id: hypothesis.hypothesis_id.clone(),
            question_id: question_id.clone(),
        })?;
    if !success.accepts(&question.response_kind) {
        return Err(HypothesisCodingError::WrongKind {
            hypothesis_id: hypothesis.hypothesis_id.clone(),
            question_id: question_id.clone(),
            predicate: success.describe(),
            kind: question.response_kind.name().to_string(),
        });
    }
    let mut coding = HypothesisCoding {
        hypothesis_id: hypothesis.hypothesis_id.clone(),
        question_id: question_id.clone(),
        predicate: success.describe(),
        verdicts: Vec::with_capacity(responses.len()),
        supports: 0,
        refutes: 0,
        not_applicable: 0,
    };
    for r in responses {
        let verdict = if r.answer.question_id != *question_id {
            Verdict::NotApplicable
        } else {
            match evaluate(success, &r.answer) {
                Some(true) => Verdict::Supports,
                Some(false) => Verdict::Refutes,
                None => Verdict::NotApplicable,
            }
        };
        match verdict {
            Verdict::Supports => coding.supports += 1,
            Verdict::Refutes => coding.refutes += 1,
            Verdict::NotApplicable => coding.not_applicable += 1,
        }
        coding.verdicts.push(ResponseVerdict {
            session_id: r.session_id.clone(),
            verdict,
        });
    }
    Ok(coding)
}
