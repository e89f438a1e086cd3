//! Inquiry-script data model, validation, and branching.

pub mod branching;
mod model;
pub mod validate;

pub use branching::{condition_holds, next_question_ids, plan, Answers, Plan};
pub use model::*;
pub use validate::{validate_json, validate_script, ValidationError, ValidationReport};

/// Example script bundled with the crate: three mental-health indices, open
/// questions about affecting factors, a poor-wellbeing probe, consistency
/// pairs and two help-seeking hypotheses.
pub const EXAMPLE_SCRIPT_JSON: &str = include_str!("../../data/mental_health_inquiry.json");

pub fn example_script() -> InquiryScript {
    InquiryScript::from_json(EXAMPLE_SCRIPT_JSON).expect("bundled example script parses")
}
