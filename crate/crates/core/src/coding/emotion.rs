use serde::{Deserialize, Serialize};

use super::{Codebook, EmotionBands, Response};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmotionLabel {
    Negative,
    Neutral,
    Positive,
}

impl EmotionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            EmotionLabel::Negative => "negative",
            EmotionLabel::Neutral => "neutral",
            EmotionLabel::Positive => "positive",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmotionCode {
    pub session_id: String,
    pub question_id: String,
    pub label: EmotionLabel,
    pub score: f64,
    pub magnitude: f64,
}

/// Both thresholds are exclusive: a score exactly on a band edge is neutral.
pub fn label_for(score: f64, bands: &EmotionBands) -> EmotionLabel {
    if score < bands.negative_below {
        EmotionLabel::Negative
    } else if score > bands.positive_above {
        EmotionLabel::Positive
    } else {
        EmotionLabel::Neutral
    }
}

/// `None` when the response carries no sentiment (non-text answers).
pub fn code_emotion(response: &Response, codebook: &Codebook) -> Option<EmotionCode> {
    let s = response.answer.derived.as_ref()?.sentiment.as_ref()?;
    Some(EmotionCode {
        session_id: response.session_id.clone(),
        question_id: response.answer.question_id.clone(),
        label: label_for(s.score, &codebook.emotion_bands),
        score: s.score,
        magnitude: s.magnitude,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let b = EmotionBands::default();
        assert_eq!(label_for(-0.3, &b), EmotionLabel::Negative);
        assert_eq!(label_for(0.0, &b), EmotionLabel::Neutral);
        assert_eq!(label_for(0.4, &b), EmotionLabel::Positive);
        assert_eq!(label_for(-0.25, &b), EmotionLabel::Neutral);
        assert_eq!(label_for(0.25, &b), EmotionLabel::Neutral);
    }
}
