use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use chrono::{DateTime, Duration, SubsecRound, Utc};
use rand::rngs::OsRng;
use rand::RngCore;
use thiserror::Error;

use super::parse::parse_reply;
use super::scrub::scrub_pii;
use super::state::{Author, ExportRecord, Reply, SessionState, Started, Status, Utterance};
use crate::answer::Answer;
use crate::quantify::Analyzer;
use crate::script::{branching, InquiryScript};
use crate::store::{Store, StoreError};

pub const COMPLETION_MESSAGE: &str = "Thank you, that was the last question. Your answers have been recorded anonymously.";

pub const DEFAULT_TTL_HOURS: i64 = 24;

pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// Clock that only moves when told to.
#[derive(Debug)]
pub struct ManualClock(Mutex<DateTime<Utc>>);

impl ManualClock {
    pub fn new(start: DateTime<Utc>) -> Self {
        Self(Mutex::new(start))
    }

    pub fn advance(&self, by: Duration) {
        let mut t = self.0.lock().unwrap();
        *t += by;
    }
}

impl Clock for ManualClock {
    fn now(&self) -> DateTime<Utc> {
        *self.0.lock().unwrap()
    }
}

pub trait TokenSource: Send + Sync {
    /// A fresh 32-char lowercase hex token.
    fn next_token(&self) -> String;
}

/// 128 bits from the operating system's secure random source.
#[derive(Debug, Default, Clone, Copy)]
pub struct OsTokens;

impl TokenSource for OsTokens {
    fn next_token(&self) -> String {
        let mut bytes = [0u8; 16];
        OsRng.fill_bytes(&mut bytes);
        hex::encode(bytes)
    }
}

/// Predictable tokens for reproducible runs. Never use in production.
#[derive(Debug, Default)]
pub struct SequentialTokens(AtomicU64);

impl TokenSource for SequentialTokens {
    fn next_token(&self) -> String {
        format!("{:032x}", self.0.fetch_add(1, Ordering::SeqCst) + 1)
    }
}

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("script not found: {0}")]
    UnknownScript(String),
    #[error("session not found: {0}")]
    UnknownSession(String),
    #[error("session not active: {status}")]
    NotActive { status: Status },
    #[error(transparent)]
    Store(#[from] StoreError),
}

type Shared = Arc<Mutex<SessionState>>;

/// Owns all live sessions. Calls on one session are serialized by its own
/// lock; different sessions proceed in parallel.
pub struct SessionManager {
    scripts: BTreeMap<String, Arc<InquiryScript>>,
    analyzer: Arc<Analyzer>,
    store: Option<Arc<Store>>,
    clock: Arc<dyn Clock>,
    tokens: Arc<dyn TokenSource>,
    ttl: Duration,
    sessions: RwLock<HashMap<String, Shared>>,
}

impl SessionManager {
    pub fn new(scripts: impl IntoIterator<Item = InquiryScript>) -> Self {
        Self {
            scripts: scripts
                .into_iter()
                .map(|s| (s.script_id.clone(), Arc::new(s)))
                .collect(),
            analyzer: Arc::new(Analyzer::bundled()),
            store: None,
            clock: Arc::new(SystemClock),
            tokens: Arc::new(OsTokens),
            ttl: Duration::hours(DEFAULT_TTL_HOURS),
            sessions: RwLock::new(HashMap::new()),
        }
    }

    pub fn with_analyzer(mut self, analyzer: Arc<Analyzer>) -> Self {
        self.analyzer = analyzer;
        self
    }

    pub fn with_clock(mut self, clock: Arc<dyn Clock>) -> Self {
        self.clock = clock;
        self
    }

    pub fn with_tokens(mut self, tokens: Arc<dyn TokenSource>) -> Self {
        self.tokens = tokens;
        self
    }

    pub fn with_ttl(mut self, ttl: Duration) -> Self {
        self.ttl = ttl;
        self
    }

    /// Attaches a store and restores the sessions it holds.
    pub fn with_store(mut self, store: Arc<Store>) -> Result<Self, SessionError> {
        let loaded = store.load()?;
        {
            let mut map = self.sessions.write().unwrap();
            for s in loaded.sessions {
                map.insert(s.session_id.clone(), Arc::new(Mutex::new(s)));
            }
        }
        self.store = Some(store);
        Ok(self)
    }

    pub fn scripts(&self) -> impl Iterator<Item = &InquiryScript> {
        self.scripts.values().map(|s| s.as_ref())
    }

    pub fn script(&self, id: &str) -> Option<&InquiryScript> {
        self.scripts.get(id).map(|s| s.as_ref())
    }

    pub fn analyzer(&self) -> &Analyzer {
        &self.analyzer
    }

    fn now(&self) -> DateTime<Utc> {
        self.clock.now().trunc_subsecs(0)
    }

    fn persist(&self, state: &SessionState) -> Result<(), SessionError> {
        if let Some(store) = &self.store {
            store.append(state)?;
        }
        Ok(())
    }

    fn get(&self, session_id: &str) -> Result<Shared, SessionError> {
        self.sessions
            .read()
            .unwrap()
            .get(session_id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownSession(session_id.to_string()))
    }

    pub fn start_session(&self, script_id: &str) -> Result<Started, SessionError> {
        let script = self
            .scripts
            .get(script_id)
            .ok_or_else(|| SessionError::UnknownScript(script_id.to_string()))?;
        let now = self.now();
        let mut state = SessionState {
            session_id: self.tokens.next_token(),
            script_id: script_id.to_string(),
            status: Status::Active,
            pending: None,
            transcript: Vec::new(),
            answers: Default::default(),
            fired_rules: Default::default(),
            created_at: now,
            updated_at: now,
        };
        let first = branching::plan(script, &state.answers, &state.fired_rules)
            .pending
            .into_iter()
            .next();
        let prompt = match first.as_deref().and_then(|q| script.question(q)) {
            Some(q) => q.prompt.clone(),
            None => {
                state.status = Status::Completed;
                COMPLETION_MESSAGE.to_string()
            }
        };
        state.pending = first;
        state.transcript.push(Utterance {
            author: Author::System,
            scrubbed_text: prompt.clone(),
            question_id: state.pending.clone(),
        });
        self.persist(&state)?;
        let session_id = state.session_id.clone();
        self.sessions
            .write()
            .unwrap()
            .insert(session_id.clone(), Arc::new(Mutex::new(state)));
        Ok(Started { session_id, prompt })
    }

    fn expired(&self, state: &SessionState, now: DateTime<Utc>) -> bool {
        state.status == Status::Active && now - state.updated_at > self.ttl
    }

    pub fn submit_utterance(&self, session_id: &str, text: &str) -> Result<Reply, SessionError> {
        let shared = self.get(session_id)?;
        let mut state = shared.lock().unwrap_or_else(|e| e.into_inner());
        let now = self.now();
        if self.expired(&state, now) {
            state.status = Status::Abandoned;
            state.pending = None;
            state.updated_at = now;
            self.persist(&state)?;
        }
        if state.status != Status::Active {
            return Err(SessionError::NotActive {
                status: state.status,
            });
        }
        let script = self
            .scripts
            .get(&state.script_id)
            .ok_or_else(|| SessionError::UnknownScript(state.script_id.clone()))?
            .clone();
        let Some(qid) = state.pending.clone() else {
            return Err(SessionError::NotActive {
                status: state.status,
            });
        };
        let question = script
            .question(&qid)
            .expect("pending questions come from the script");

        // the raw text goes no further than this line
        let scrubbed = scrub_pii(text).text;
        state.transcript.push(Utterance {
            author: Author::Respondent,
            scrubbed_text: scrubbed.clone(),
            question_id: Some(qid.clone()),
        });
        state.updated_at = now;

        let value = match parse_reply(&question.response_kind, &scrubbed) {
            Ok(v) => v,
            Err(retry) => {
                state.transcript.push(Utterance {
                    author: Author::System,
                    scrubbed_text: retry.clone(),
                    question_id: Some(qid),
                });
                self.persist(&state)?;
                return Ok(Reply {
                    accepted: false,
                    retry_message: Some(retry),
                    next_prompt: None,
                    completed: false,
                });
            }
        };
        let mut answer = Answer::new(qid.clone(), value);
        if let Some(text) = answer.value.as_text() {
            if let Some(d) = self.analyzer.derive(&question.response_kind, text) {
                answer = answer.with_derived(d);
            }
        }
        state.answers.insert(qid, answer);

        let plan = branching::plan(&script, &state.answers, &state.fired_rules);
        state.fired_rules.extend(plan.newly_fired);
        let next = plan.pending.into_iter().next();
        let (prompt, completed) = match next.as_deref().and_then(|q| script.question(q)) {
            Some(q) => (q.prompt.clone(), false),
            None => (COMPLETION_MESSAGE.to_string(), true),
        };
        if completed {
            state.status = Status::Completed;
        }
        state.pending = next.clone();
        state.transcript.push(Utterance {
            author: Author::System,
            scrubbed_text: prompt.clone(),
            question_id: next,
        });
        self.persist(&state)?;
        Ok(Reply {
            accepted: true,
            retry_message: None,
            next_prompt: Some(prompt),
            completed,
        })
    }

    pub fn state(&self, session_id: &str) -> Result<SessionState, SessionError> {
        let shared = self.get(session_id)?;
        let state = shared.lock().unwrap_or_else(|e| e.into_inner());
        Ok(state.clone())
    }

    pub fn export_session(&self, session_id: &str) -> Result<ExportRecord, SessionError> {
        Ok(ExportRecord::from(&self.state(session_id)?))
    }

    /// Export copies of every session, optionally for one script, ordered
    /// by session id.
    pub fn snapshot(&self, script_id: Option<&str>) -> Vec<ExportRecord> {
        let shared: Vec<Shared> = self.sessions.read().unwrap().values().cloned().collect();
        let mut out: Vec<ExportRecord> = shared
            .iter()
            .map(|s| ExportRecord::from(&*s.lock().unwrap_or_else(|e| e.into_inner())))
            .filter(|r| script_id.is_none_or(|id| r.script_id == id))
            .collect();
        out.sort_by(|a, b| a.session_id.cmp(&b.session_id));
        out
    }

    /// Marks idle active sessions as abandoned. Returns how many changed.
    pub fn sweep_expired(&self) -> Result<usize, SessionError> {
        let now = self.now();
        let shared: Vec<Shared> = self.sessions.read().unwrap().values().cloned().collect();
        let mut n = 0;
        for s in shared {
            let mut state = s.lock().unwrap_or_else(|e| e.into_inner());
            if self.expired(&state, now) {
                state.status = Status::Abandoned;
                state.pending = None;
                state.updated_at = now;
                self.persist(&state)?;
                n += 1;
            }
        }
        Ok(n)
    }

    pub fn session_count(&self) -> usize {
        self.sessions.read().unwrap().len()
    }
}
