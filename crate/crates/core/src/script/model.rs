use serde::{Deserialize, Serialize};

use crate::quantify::{ActivityUnit, PeriodUnit};

/// A complete inquiry: questions, branching, consistency pairs, clinical
/// indices and hypotheses. Serialized as one JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InquiryScript {
    pub script_id: String,
    pub title: String,
    pub questions: Vec<Question>,
    #[serde(default)]
    pub branch_rules: Vec<BranchRule>,
    #[serde(default)]
    pub consistency_pairs: Vec<ConsistencyPair>,
    #[serde(default)]
    pub indices: Vec<IndexDefinition>,
    #[serde(default)]
    pub hypotheses: Vec<HypothesisDefinition>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Question {
    pub question_id: String,
    pub prompt: String,
    pub response_kind: ResponseKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResponseKind {
    ObjectiveScale {
        min: i64,
        max: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
    },
    FreeText,
    Frequency {
        activity_unit: ActivityUnit,
        period_unit: PeriodUnit,
    },
    YesNo,
}

impl ResponseKind {
    pub fn scale_range(&self) -> Option<(i64, i64)> {
        match self {
            ResponseKind::ObjectiveScale { min, max, .. } => Some((*min, *max)),
            _ => None,
        }
    }

    /// Free text and frequency answers are stored as scrubbed text.
    pub fn is_textual(&self) -> bool {
        matches!(self, ResponseKind::FreeText | ResponseKind::Frequency { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ResponseKind::ObjectiveScale { .. } => "objective_scale",
            ResponseKind::FreeText => "free_text",
            ResponseKind::Frequency { .. } => "frequency",
            ResponseKind::YesNo => "yes_no",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchRule {
    pub rule_id: String,
    pub trigger: Condition,
    pub follow_ups: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Condition {
    ScoreBelow {
        question_id: String,
        threshold: f64,
    },
    ScoreAtLeast {
        question_id: String,
        threshold: f64,
    },
    IndexInBand {
        index_id: String,
        band: String,
    },
    AnswerIs {
        question_id: String,
        value: ExpectedValue,
    },
    ContainsEntity {
        question_id: String,
        lemma: String,
    },
    SentimentBelow {
        question_id: String,
        threshold: f64,
    },
}

/// Literal compared against an answer by [`Condition::AnswerIs`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExpectedValue {
    Bool(bool),
    Int(i64),
    Text(String),
}

impl Condition {
    /// The single question a condition reads, if it reads exactly one.
    pub fn question_id(&self) -> Option<&str> {
        match self {
            Condition::ScoreBelow { question_id, .. }
            | Condition::ScoreAtLeast { question_id, .. }
            | Condition::AnswerIs { question_id, .. }
            | Condition::ContainsEntity { question_id, .. }
            | Condition::SentimentBelow { question_id, .. } => Some(question_id),
            Condition::IndexInBand { .. } => None,
        }
    }
}

/// `+1` or `-1`, written as a JSON integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Positive,
    Negative,
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Sign::Positive),
            -1 => Ok(Sign::Negative),
            other => Err(format!("sign must be 1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Positive => 1,
            Sign::Negative => -1,
        }
    }
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Positive => 1.0,
            Sign::Negative => -1.0,
        }
    }
}

/// Two scale questions expected to correlate with the given sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyPair {
    pub question_a: String,
    pub question_b: String,
    pub expected_sign: Sign,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineTransform {
    pub scale: f64,
    pub offset: f64,
}

impl AffineTransform {
    pub fn apply(&self, raw: f64) -> f64 {
        self.scale * raw + self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub label: String,
    /// Inclusive upper bound of the transformed score.
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexDefinition {
    pub index_id: String,
    pub item_question_ids: Vec<String>,
    /// `+1` normal, `-1` reversed, one per item.
    pub item_polarity: Vec<Sign>,
    pub transform: AffineTransform,
    pub bands: Vec<Band>,
}

impl IndexDefinition {
    pub fn band_for(&self, transformed: f64) -> Option<&Band> {
        self.bands.iter().find(|b| transformed <= b.upper)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    Left,
    Right,
    Two,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisDefinition {
    pub hypothesis_id: String,
    pub statement: String,
    pub test: HypothesisTest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HypothesisTest {
    ProportionTest {
        question_id: String,
        success: SuccessPredicate,
        null_p0: f64,
        tail: Tail,
    },
    MeanTest {
        question_id: String,
        null_mu0: f64,
        tail: Tail,
    },
}

impl HypothesisTest {
    pub fn question_id(&self) -> &str {
        match self {
            HypothesisTest::ProportionTest { question_id, .. }
            | HypothesisTest::MeanTest { question_id, .. } => question_id,
        }
    }

    pub fn tail(&self) -> Tail {
        match self {
            HypothesisTest::ProportionTest { tail, .. } | HypothesisTest::MeanTest { tail, .. } => {
                *tail
            }
        }
    }
}

/// Predicate marking a response as a "success" for a proportion test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SuccessPredicate {
    YesNoIs { value: bool },
    ScaleAtLeast { value: i64 },
    ScaleAtMost { value: i64 },
    ContainsEntity { lemma: String },
    SentimentBelow { threshold: f64 },
    FrequencyAtLeast { per_day: f64 },
    FrequencyAtMost { per_day: f64 },
}

impl SuccessPredicate {
    pub fn accepts(&self, kind: &ResponseKind) -> bool {
        match self {
            SuccessPredicate::YesNoIs { .. } => matches!(kind, ResponseKind::YesNo),
            SuccessPredicate::ScaleAtLeast { .. } | SuccessPredicate::ScaleAtMost { .. } => {
                matches!(kind, ResponseKind::ObjectiveScale { .. })
            }
            SuccessPredicate::ContainsEntity { .. } | SuccessPredicate::SentimentBelow { .. } => {
                kind.is_textual()
            }
            SuccessPredicate::FrequencyAtLeast { .. } | SuccessPredicate::FrequencyAtMost { .. } => {
                matches!(kind, ResponseKind::Frequency { .. })
            }
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SuccessPredicate::YesNoIs { value } => {
                format!("answer is {}", if *value { "yes" } else { "no" })
            }
            SuccessPredicate::ScaleAtLeast { value } => format!("scale >= {value}"),
            SuccessPredicate::ScaleAtMost { value } => format!("scale <= {value}"),
            SuccessPredicate::ContainsEntity { lemma } => format!("mentions {lemma:?}"),
            SuccessPredicate::SentimentBelow { threshold } => format!("sentiment < {threshold}"),
            SuccessPredicate::FrequencyAtLeast { per_day } => format!("per-day rate >= {per_day}"),
            SuccessPredicate::FrequencyAtMost { per_day } => format!("per-day rate <= {per_day}"),
        }
    }
}

impl InquiryScript {
    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scripts always serialize")
    }

    pub fn question(&self, id: &str) -> Option<&Question> {
        self.questions.iter().find(|q| q.question_id == id)
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.questions.iter().position(|q| q.question_id == id)
    }

    pub fn index(&self, id: &str) -> Option<&IndexDefinition> {
        self.indices.iter().find(|i| i.index_id == id)
    }

    /// Questions delivered to every respondent: those not inserted by a branch
    /// rule, in script order.
    pub fn base_question_ids(&self) -> Vec<&str> {
        self.questions
            .iter()
            .map(|q| q.question_id.as_str())
            .filter(|id| {
                !self
                    .branch_rules
                    .iter()
                    .any(|r| r.follow_ups.iter().any(|f| f == id))
            })
            .collect()
    }

    /// Questions read by a rule's trigger.
    pub fn trigger_questions<'a>(&'a self, rule: &'a BranchRule) -> Vec<&'a str> {
        match &rule.trigger {
            Condition::IndexInBand { index_id, .. } => self
                .index(index_id)
                .map(|i| i.item_question_ids.iter().map(String::as_str).collect())
                .unwrap_or_default(),
            other => other.question_id().into_iter().collect(),
        }
    }

    /// The question after which a rule's follow-ups are inserted: the trigger
    /// question, or for index conditions the item that comes last in the
    /// script.
    pub fn rule_anchor<'a>(&'a self, rule: &'a BranchRule) -> Option<&'a str> {
        self.trigger_questions(rule)
            .into_iter()
            .max_by_key(|id| self.position(id).unwrap_or(0))
    }
}
