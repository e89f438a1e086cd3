#![allow(dead_code)]

use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use chrono::{TimeZone, Utc};
use http_body_util::BodyExt;
use tower::ServiceExt;

use inquiry_core::analytics::ReportOptions;
use inquiry_core::script::{example_script, InquiryScript, ResponseKind};
use inquiry_core::session::{ManualClock, SequentialTokens, SessionManager};
use inquiry_core::store::Store;
use inquiry_service::AppState;

pub const SCRIPT_ID: &str = "mental-health-2022";

pub fn start_time() -> chrono::DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 3, 1, 9, 0, 0).unwrap()
}

/// Deterministic manager over the bundled script, with an optional store.
pub fn manager(store: Option<Arc<Store>>) -> (SessionManager, Arc<ManualClock>) {
    let clock = Arc::new(ManualClock::new(start_time()));
    let m = SessionManager::new(vec![example_script()])
        .with_clock(clock.clone())
        .with_tokens(Arc::new(SequentialTokens::default()));
    let m = match store {
        Some(s) => m.with_store(s).expect("store loads"),
        None => m,
    };
    (m, clock)
}

pub fn app_state(manager: SessionManager) -> AppState {
    AppState {
        manager: Arc::new(manager),
        report_options: Arc::new(ReportOptions::default()),
    }
}

pub async fn call(app: &Router, method: &str, uri: &str, body: Option<&str>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder()
        .method(method)
        .uri(uri)
        .header("content-type", "application/json")
        .body(match body {
            Some(b) => Body::from(b.to_string()),
            None => Body::empty(),
        })
        .unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes)
}

pub fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).expect("response is JSON")
}

/// A plain valid reply for any question of the bundled script.
pub fn plain_answer(script: &InquiryScript, qid: &str) -> String {
    match &script.question(qid).unwrap().response_kind {
        ResponseKind::ObjectiveScale { min, max, .. } => ((min + max) / 2).to_string(),
        ResponseKind::YesNo => "yes".into(),
        ResponseKind::Frequency { .. } => "twice a week".into(),
        ResponseKind::FreeText => "exams and money worries keep me anxious".into(),
    }
}

/// Answers questions until the session completes, choosing each reply with
/// `answer(question_id)`. Returns the number of accepted replies.
pub fn drive(m: &SessionManager, session_id: &str, mut answer: impl FnMut(&str) -> String) -> usize {
    let mut accepted = 0;
    loop {
        let state = m.state(session_id).unwrap();
        let Some(qid) = state.pending else {
            return accepted;
        };
        let reply = m.submit_utterance(session_id, &answer(&qid)).unwrap();
        assert!(reply.accepted, "reply to {qid} rejected: {reply:?}");
        accepted += 1;
        if reply.completed {
            return accepted;
        }
    }
}
