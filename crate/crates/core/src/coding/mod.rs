//! Qualitative coding over quantified responses: themes, emotions, causal
//! chains and hypothesis verdicts.

mod causation;
mod codebook;
mod emotion;
mod hypothesis;
mod themes;

pub use causation::{causal_links, code_causation, CausalChain, CausalLink};
pub use codebook::{
    trigger_lemma, Codebook, CodebookError, Connective, Direction, EmotionBands, DEFAULT_CODEBOOK_JSON,
};
pub use emotion::{code_emotion, label_for, EmotionCode, EmotionLabel};
pub use hypothesis::{
    code_hypothesis, evaluate, HypothesisCoding, HypothesisCodingError, ResponseVerdict, Verdict,
};
pub use themes::{
    code_themes_deductive, code_themes_inductive, EmergentTheme, Evidence, InductiveThemes,
    ThemeAssignment, ThemeMode,
};

use crate::answer::Answer;
use crate::quantify::Entity;
use crate::session::ExportRecord;

/// One answer together with the session it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub session_id: String,
    pub answer: Answer,
}

impl Response {
    pub fn new(session_id: impl Into<String>, answer: Answer) -> Self {
        Self {
            session_id: session_id.into(),
            answer,
        }
    }

    pub fn text(&self) -> Option<&str> {
        self.answer.value.as_text()
    }

    pub fn entities(&self) -> &[Entity] {
        self.answer
            .derived
            .as_ref()
            .map(|d| d.entities.as_slice())
            .unwrap_or(&[])
    }
}

/// Flattens exported sessions into responses, optionally keeping one
/// question only.
pub fn responses_from(records: &[ExportRecord], question_id: Option<&str>) -> Vec<Response> {
    records
        .iter()
        .flat_map(|rec| {
            rec.answers
                .values()
                .filter(move |a| question_id.is_none_or(|q| a.question_id == q))
                .map(move |a| Response::new(rec.session_id.clone(), a.clone()))
        })
        .collect()
}
