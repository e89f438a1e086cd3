//! Turns free-form text into entities, frequency rates and sentiment.

mod entities;
mod frequency;
pub mod lexicon;
mod sentiment;

use std::path::Path;

use once_cell::sync::Lazy;
use serde::Serialize;

pub use entities::{extract_entities_with, phrase_lemma, Entity, EntityLabel, NounLexicon};
pub use frequency::{
    ActivityUnit, FrequencyRule, FrequencyScore, FrequencyVocabulary, PeriodUnit, QuestionUnits,
    SourceKind,
};
pub use lexicon::TableError;
pub use sentiment::{is_negator, SentimentLexicon, SentimentResult, NEGATION_WINDOW};

use crate::answer::DerivedQuantities;
use crate::script::ResponseKind;

/// Bundle of the lexicons used to quantify responses. Immutable once built.
#[derive(Debug, Clone)]
pub struct Analyzer {
    pub nouns: NounLexicon,
    pub sentiment: SentimentLexicon,
    pub vocabulary: FrequencyVocabulary,
}

static BUNDLED: Lazy<Analyzer> = Lazy::new(Analyzer::bundled);

impl Default for Analyzer {
    fn default() -> Self {
        BUNDLED.clone()
    }
}

/// Output of `quantify --text`.
#[derive(Debug, Clone, Serialize)]
pub struct Quantification {
    pub entities: Vec<Entity>,
    pub frequency: Option<FrequencyScore>,
    pub sentiment: SentimentResult,
}

impl Analyzer {
    pub fn bundled() -> Self {
        Self {
            nouns: NounLexicon::bundled(),
            sentiment: SentimentLexicon::bundled(),
            vocabulary: FrequencyVocabulary::bundled(),
        }
    }

    /// Bundled analyzer with the sentiment lexicon and/or frequency
    /// vocabulary replaced from files.
    pub fn with_files(
        lexicon: Option<&Path>,
        vocabulary: Option<&Path>,
    ) -> Result<Self, TableError> {
        let mut a = Self::bundled();
        if let Some(p) = lexicon {
            a.sentiment = SentimentLexicon::load(p)?;
        }
        if let Some(p) = vocabulary {
            a.vocabulary = FrequencyVocabulary::load(p)?;
        }
        Ok(a)
    }

    pub fn extract_entities(&self, text: &str) -> Vec<Entity> {
        extract_entities_with(text, &self.nouns)
    }

    pub fn score_frequency(&self, text: &str, units: QuestionUnits) -> Option<FrequencyScore> {
        self.vocabulary.score(text, units)
    }

    pub fn analyze_sentiment(&self, text: &str) -> SentimentResult {
        self.sentiment.analyze(text)
    }

    /// All three analyses; frequency only when units are given.
    pub fn quantify(&self, text: &str, units: Option<QuestionUnits>) -> Quantification {
        Quantification {
            entities: self.extract_entities(text),
            frequency: units.and_then(|u| self.score_frequency(text, u)),
            sentiment: self.analyze_sentiment(text),
        }
    }

    /// Quantities stored alongside an accepted text answer.
    pub fn derive(&self, kind: &ResponseKind, text: &str) -> Option<DerivedQuantities> {
        match kind {
            ResponseKind::FreeText => Some(DerivedQuantities {
                entities: self.extract_entities(text),
                frequency: None,
                sentiment: Some(self.analyze_sentiment(text)),
            }),
            ResponseKind::Frequency {
                activity_unit,
                period_unit,
            } => Some(DerivedQuantities {
                entities: self.extract_entities(text),
                frequency: self.score_frequency(text, QuestionUnits::new(*activity_unit, *period_unit)),
                sentiment: Some(self.analyze_sentiment(text)),
            }),
            ResponseKind::ObjectiveScale { .. } | ResponseKind::YesNo => None,
        }
    }
}

pub fn extract_entities(text: &str) -> Vec<Entity> {
    BUNDLED.extract_entities(text)
}

pub fn score_frequency(text: &str, units: QuestionUnits) -> Option<FrequencyScore> {
    BUNDLED.score_frequency(text, units)
}

pub fn analyze_sentiment(text: &str) -> SentimentResult {
    BUNDLED.analyze_sentiment(text)
}
