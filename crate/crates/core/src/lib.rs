//! Conversational contextual-inquiry engine.
//!
//! Respondents answer a branching [`script::InquiryScript`] through an
//! anonymous [`session`]. Free-text replies are scrubbed of personal
//! information, then [`quantify`]-ed into entities, frequency rates and
//! sentiment, [`coding`]-ed into themes, emotions, causal chains and
//! hypothesis verdicts, and finally summarised by [`analytics`].

pub mod analytics;
pub mod answer;
pub mod coding;
pub mod quantify;
pub mod script;
pub mod session;
pub mod store;
pub mod text;

pub use answer::{Answer, AnswerValue, DerivedQuantities};
pub use script::InquiryScript;
