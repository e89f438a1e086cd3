//! Anonymous respondent sessions: prompting, scrubbing, parsing, branching.

mod audit;
mod manager;
mod parse;
mod scrub;
mod state;

pub use audit::{audit_ndjson, Finding};
pub use manager::{
    Clock, ManualClock, OsTokens, SequentialTokens, SessionError, SessionManager, SystemClock,
    TokenSource, COMPLETION_MESSAGE, DEFAULT_TTL_HOURS,
};
pub use parse::{parse_reply, parse_scale, parse_text, parse_yes_no};
pub use scrub::{contains_pii, find_phones, scrub_pii, PiiKind, Redaction, Scrubbed};
pub use state::{Author, ExportRecord, Reply, SessionState, Started, Status, Utterance};
