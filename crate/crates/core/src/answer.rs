use serde::{Deserialize, Serialize};

use crate::quantify::{Entity, FrequencyScore, SentimentResult};

/// A stored reply to one question. Text values are always scrubbed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Answer {
    pub question_id: String,
    pub value: AnswerValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derived: Option<DerivedQuantities>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerValue {
    Scale(i64),
    YesNo(bool),
    Text(String),
}

impl AnswerValue {
    pub fn as_scale(&self) -> Option<i64> {
        match self {
            AnswerValue::Scale(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_yes_no(&self) -> Option<bool> {
        match self {
            AnswerValue::YesNo(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            AnswerValue::Text(t) => Some(t),
            _ => None,
        }
    }
}

/// Quantities computed from a text answer at submission time.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    #[serde(default)]
    pub entities: Vec<Entity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frequency: Option<FrequencyScore>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sentiment: Option<SentimentResult>,
}

impl Answer {
    pub fn new(question_id: impl Into<String>, value: AnswerValue) -> Self {
        Self {
            question_id: question_id.into(),
            value,
            derived: None,
        }
    }

    pub fn with_derived(mut self, derived: DerivedQuantities) -> Self {
        self.derived = Some(derived);
        self
    }

    pub fn sentiment_score(&self) -> Option<f64> {
        self.derived.as_ref()?.sentiment.as_ref().map(|s| s.score)
    }

    pub fn per_day_rate(&self) -> Option<f64> {
        self.derived
            .as_ref()?
            .frequency
            .as_ref()
            .map(|f| f.per_day_rate)
    }

    /// True when any extracted entity has this lemma, or contains it as one of
    /// its words.
    pub fn mentions_lemma(&self, lemma: &str) -> bool {
        let wanted = crate::text::lemmatize(lemma);
        self.derived.as_ref().is_some_and(|d| {
            d.entities
                .iter()
                .any(|e| {
                    e.lemma == wanted
                        || e.lemma.split(' ').any(|w| crate::text::lemmatize(w) == wanted)
                })
        })
    }
}
