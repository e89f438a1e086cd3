use std::io::Write;
use std::sync::Arc;

use chrono::{DateTime, Duration, Utc};

use inquiry_core::script::{example_script, InquiryScript, ResponseKind};
use inquiry_core::session::{
    audit_ndjson, parse_reply, scrub_pii, Author, ManualClock, PiiKind, SequentialTokens, SessionError, SessionManager,
    Status,
};
use inquiry_core::store::{self, Store, StoreError};
use inquiry_core::AnswerValue;

const SCRIPT_ID: &str = "mental-health-2022";

fn start() -> DateTime<Utc> {
    DateTime::parse_from_rfc3339("2024-03-01T09:00:00Z").unwrap().with_timezone(&Utc)
}

fn manager(store: Option<Arc<Store>>) -> (SessionManager, Arc<ManualClock>) {
    let clock = Arc::new(ManualClock::new(start()));
    let m = SessionManager::new([example_script()])
        .with_clock(clock.clone())
        .with_tokens(Arc::new(SequentialTokens::default()));
    let m = match store {
        Some(s) => m.with_store(s).unwrap(),
        None => m,
    };
    (m, clock)
}

fn plain_answer(script: &InquiryScript, qid: &str) -> String {
    match &script.question(qid).unwrap().response_kind {
        ResponseKind::ObjectiveScale { min, max, .. } => ((min + max) / 2).to_string(),
        ResponseKind::YesNo => "yes".into(),
        ResponseKind::Frequency { .. } => "twice a week".into(),
        ResponseKind::FreeText => "exams keep me anxious".into(),
    }
}

/// Answers until the session ends; returns the question ids in the order asked.
fn drive(m: &SessionManager, id: &str, mut answer: impl FnMut(&str) -> String) -> Vec<String> {
    let mut asked = Vec::new();
    while let Some(qid) = m.state(id).unwrap().pending {
        let r = m.submit_utterance(id, &answer(&qid)).unwrap();
        assert!(r.accepted, "{qid}: {:?}", r.retry_message);
        asked.push(qid);
    }
    asked
}

#[test]
fn no_never_have_is_a_no() {
    let kind = ResponseKind::YesNo;
    assert_eq!(parse_reply(&kind, "no, never have"), Ok(AnswerValue::YesNo(false)));
    assert_eq!(parse_reply(&kind, "Yes I did"), Ok(AnswerValue::YesNo(true)));
    assert!(parse_reply(&kind, "perhaps").is_err());

    let script = example_script();
    let (m, _) = manager(None);
    let id = m.start_session(SCRIPT_ID).unwrap().session_id;
    drive(&m, &id, |q| if q == "Q4" { "no, never have".into() } else { plain_answer(&script, q) });
    assert_eq!(m.export_session(&id).unwrap().answers["Q4"].value, AnswerValue::YesNo(false));
}

#[test]
fn scrub_offsets_and_idempotence() {
    let text = "email a@b.com or see John Smith";
    let s = scrub_pii(text);
    let spans: Vec<(PiiKind, usize, usize)> = s.redactions.iter().map(|r| (r.kind, r.start, r.end)).collect();
    assert_eq!(spans, [(PiiKind::Email, 6, 13), (PiiKind::Name, 21, 31)]);
    assert_eq!(s.text, "email [REDACTED:EMAIL] or see [REDACTED:NAME]");
    let again = scrub_pii(&s.text);
    assert_eq!(again.text, s.text);
    assert!(again.redactions.is_empty());
}

#[test]
fn retries_keep_the_question_pending() {
    let (m, _) = manager(None);
    let id = m.start_session(SCRIPT_ID).unwrap().session_id;
    drive_until(&m, &id, "WHO5_Q1");
    for bad in ["nine", "seven", "-1"] {
        let r = m.submit_utterance(&id, bad).unwrap();
        assert!(!r.accepted);
        assert!(r.retry_message.unwrap().contains("0 to 5"));
        assert_eq!(m.state(&id).unwrap().pending.as_deref(), Some("WHO5_Q1"));
    }
    assert!(m.submit_utterance(&id, "three").unwrap().accepted);
}

fn drive_until(m: &SessionManager, id: &str, target: &str) {
    let script = example_script();
    while let Some(q) = m.state(id).unwrap().pending {
        if q == target {
            return;
        }
        m.submit_utterance(id, &plain_answer(&script, &q)).unwrap();
    }
    panic!("{target} never asked");
}

#[test]
fn store_holds_only_scrubbed_text() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.ndjson");
    let script = example_script();
    let (m, _) = manager(Some(Arc::new(Store::open(&path).unwrap())));
    let id = m.start_session(SCRIPT_ID).unwrap().session_id;
    drive(&m, &id, |q| match q {
        "Q1" => "ask Maria Lopez, maria.lopez@example.org or +44 20 7946 0958".into(),
        _ => plain_answer(&script, q),
    });
    let content = std::fs::read_to_string(&path).unwrap();
    for raw in ["Maria", "Lopez", "maria.lopez@example.org", "7946"] {
        assert!(!content.contains(raw), "{raw} leaked");
    }
    assert!(audit_ndjson(&content).is_empty());
    let state = m.state(&id).unwrap();
    let q1 = state
        .transcript
        .iter()
        .find(|u| u.author == Author::Respondent && u.question_id.as_deref() == Some("Q1"))
        .unwrap();
    assert_eq!(q1.scrubbed_text, "ask [REDACTED:NAME], [REDACTED:EMAIL] or [REDACTED:PHONE]");
}

#[test]
fn truncated_tail_is_recovered() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.ndjson");
    let id = {
        let (m, _) = manager(Some(Arc::new(Store::open(&path).unwrap())));
        let id = m.start_session(SCRIPT_ID).unwrap().session_id;
        m.submit_utterance(&id, "work pressure").unwrap();
        id
    };
    let before = std::fs::read_to_string(&path).unwrap();
    // a crash in the middle of an append
    std::fs::OpenOptions::new()
        .append(true)
        .open(&path)
        .unwrap()
        .write_all(br#"{"session_id":"0000","scr"#)
        .unwrap();
    let loaded = store::load(&path).unwrap();
    assert!(loaded.truncated_tail);
    assert_eq!(loaded.sessions.len(), 1);

    let reopened = Arc::new(Store::open(&path).unwrap());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), before);
    let (m, _) = manager(Some(reopened));
    assert_eq!(m.state(&id).unwrap().pending.as_deref(), Some("WHO5_Q1"));
    assert!(m.submit_utterance(&id, "4").unwrap().accepted);
    assert!(!store::load(&path).unwrap().truncated_tail);
}

#[test]
fn corrupt_middle_line_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.ndjson");
    {
        let (m, _) = manager(Some(Arc::new(Store::open(&path).unwrap())));
        m.start_session(SCRIPT_ID).unwrap();
    }
    let content = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, format!("not json\n{content}")).unwrap();
    assert!(matches!(store::load(&path), Err(StoreError::Corrupt { line: 1, .. })));
    assert!(matches!(store::load(&dir.path().join("gone")), Err(StoreError::NotFound(_))));
}

#[test]
fn compaction_keeps_latest_state() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.ndjson");
    let script = example_script();
    let (m, _) = manager(Some(Arc::new(Store::open(&path).unwrap())));
    for _ in 0..3 {
        let id = m.start_session(SCRIPT_ID).unwrap().session_id;
        drive(&m, &id, |q| plain_answer(&script, q));
    }
    let before = store::load(&path).unwrap();
    assert!(std::fs::read_to_string(&path).unwrap().lines().count() > 3);
    assert_eq!(store::compact(&path).unwrap(), 3);
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 3);
    assert_eq!(store::load(&path).unwrap(), before);
}

#[test]
fn idle_sessions_are_abandoned_after_a_day() {
    let (m, clock) = manager(None);
    let a = m.start_session(SCRIPT_ID).unwrap().session_id;
    let b = m.start_session(SCRIPT_ID).unwrap().session_id;
    clock.advance(Duration::hours(23));
    m.submit_utterance(&b, "family").unwrap();
    clock.advance(Duration::hours(2));
    assert_eq!(m.sweep_expired().unwrap(), 1);
    assert_eq!(m.state(&a).unwrap().status, Status::Abandoned);
    assert!(matches!(
        m.submit_utterance(&a, "hello"),
        Err(SessionError::NotActive { status: Status::Abandoned })
    ));
    assert_eq!(m.state(&b).unwrap().status, Status::Active);

    // expiry is also noticed on the next utterance, without a sweep
    clock.advance(Duration::hours(25));
    assert!(matches!(
        m.submit_utterance(&b, "4"),
        Err(SessionError::NotActive { status: Status::Abandoned })
    ));
    assert_eq!(m.sweep_expired().unwrap(), 0);
}

#[test]
fn completed_and_unknown_sessions_are_refused() {
    let script = example_script();
    let (m, _) = manager(None);
    let id = m.start_session(SCRIPT_ID).unwrap().session_id;
    drive(&m, &id, |q| plain_answer(&script, q));
    assert!(matches!(
        m.submit_utterance(&id, "more"),
        Err(SessionError::NotActive { status: Status::Completed })
    ));
    assert!(matches!(m.submit_utterance("nope", "x"), Err(SessionError::UnknownSession(_))));
    assert!(matches!(m.start_session("nope"), Err(SessionError::UnknownScript(_))));
}

#[test]
fn concurrent_sessions_do_not_interfere() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.ndjson");
    let script = example_script();
    let (m, _) = manager(Some(Arc::new(Store::open(&path).unwrap())));
    let ids: Vec<Vec<String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..8)
            .map(|t| {
                let (m, script) = (&m, &script);
                scope.spawn(move || {
                    (0..10)
                        .map(|_| {
                            let id = m.start_session(SCRIPT_ID).unwrap().session_id;
                            drive(m, &id, |q| match q {
                                "WHO5_Q1" => (t % 6).to_string(),
                                _ => plain_answer(script, q),
                            });
                            id
                        })
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    for (t, ids) in ids.iter().enumerate() {
        for id in ids {
            let r = m.export_session(id).unwrap();
            assert_eq!(r.status, Status::Completed);
            assert_eq!(r.answers["WHO5_Q1"].value, AnswerValue::Scale((t % 6) as i64));
        }
    }
    let loaded = store::load(&path).unwrap();
    assert_eq!(loaded.sessions.len(), 80);
    assert!(loaded.sessions.iter().all(|s| s.status == Status::Completed));
}
