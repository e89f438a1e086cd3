mod common;

use std::sync::Arc;

use axum::http::StatusCode;
use serde_json::Value;

use inquiry_core::script::example_script;
use inquiry_core::session::COMPLETION_MESSAGE;
use inquiry_core::store::Store;
use inquiry_service::cli;

use common::{app_state, call, json, manager, plain_answer, SCRIPT_ID};

fn start_body() -> String {
    format!(r#"{{"script_id":"{SCRIPT_ID}"}}"#)
}

fn message(text: &str) -> String {
    serde_json::json!({ "text": text }).to_string()
}

async fn start(app: &axum::Router) -> (String, String) {
    let (status, body) = call(app, "POST", "/sessions", Some(&start_body())).await;
    assert_eq!(status, StatusCode::CREATED);
    let v = json(&body);
    (v["session_id"].as_str().unwrap().into(), v["prompt"].as_str().unwrap().into())
}

/// Answers every pending question over HTTP; `answer` may override replies.
async fn complete(app: &axum::Router, id: &str, answer: impl Fn(&str) -> Option<String>) -> Vec<String> {
    let script = example_script();
    let mut asked = Vec::new();
    let mut prompt_qid = script.questions[0].question_id.clone();
    loop {
        asked.push(prompt_qid.clone());
        let text = answer(&prompt_qid).unwrap_or_else(|| plain_answer(&script, &prompt_qid));
        let (status, body) = call(app, "POST", &format!("/sessions/{id}/message"), Some(&message(&text))).await;
        assert_eq!(status, StatusCode::OK, "{}", String::from_utf8_lossy(&body));
        let reply = json(&body);
        if reply["completed"] == true {
            assert_eq!(reply["next_prompt"], COMPLETION_MESSAGE);
            return asked;
        }
        let next = reply["next_prompt"].as_str().unwrap();
        prompt_qid = script
            .questions
            .iter()
            .find(|q| q.prompt == next)
            .expect("prompt belongs to the script")
            .question_id
            .clone();
    }
}

fn fresh_app() -> axum::Router {
    let (m, _) = manager(None);
    inquiry_service::router(app_state(m))
}

#[tokio::test]
async fn start_session_returns_201_and_first_prompt() {
    let app = fresh_app();
    let (id, prompt) = start(&app).await;
    assert_eq!(id.len(), 32);
    assert_eq!(prompt, example_script().questions[0].prompt);
}

#[tokio::test]
async fn unknown_fields_on_input_are_ignored() {
    let app = fresh_app();
    let body = format!(r#"{{"script_id":"{SCRIPT_ID}","colour":"blue"}}"#);
    let (status, _) = call(&app, "POST", "/sessions", Some(&body)).await;
    assert_eq!(status, StatusCode::CREATED);
}

#[tokio::test]
async fn unknown_script_is_404() {
    let app = fresh_app();
    let (status, body) = call(&app, "POST", "/sessions", Some(r#"{"script_id":"nope"}"#)).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(json(&body)["code"], "script_not_found");
}

#[tokio::test]
async fn malformed_bodies_are_422() {
    let app = fresh_app();
    for body in ["", "{", "[]", r#"{"script":"x"}"#, r#"{"script_id":3}"#] {
        let (status, resp) = call(&app, "POST", "/sessions", Some(body)).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "body {body:?}");
        assert_eq!(json(&resp)["code"], "malformed_body");
    }
    let (id, _) = start(&app).await;
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/message"), Some(r#"{"txt":"hi"}"#)).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
}

#[tokio::test]
async fn rejected_utterance_is_400_with_retry_message() {
    let app = fresh_app();
    let (id, _) = start(&app).await;
    // Q1 is free text, WHO5_Q1 a 0..5 scale
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/message"), Some(&message("exams"))).await;
    assert_eq!(status, StatusCode::OK);
    let (status, body) = call(&app, "POST", &format!("/sessions/{id}/message"), Some(&message("banana"))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let v = json(&body);
    assert_eq!(v["code"], "rejected_utterance");
    assert!(v["retry_message"].as_str().unwrap().contains("0 to 5"), "{v}");
    // the question is still pending and a valid reply goes through
    let (status, _) = call(&app, "POST", &format!("/sessions/{id}/message"), Some(&message("3"))).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn unknown_session_is_404() {
    let app = fresh_app();
    let missing = "0".repeat(32);
    let (status, body) = call(&app, "GET", &format!("/sessions/{missing}"), None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(json(&body)["code"], "session_not_found");
    let (status, _) = call(&app, "POST", &format!("/sessions/{missing}/message"), Some(&message("hi"))).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = call(&app, "GET", "/no/such/route", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn message_to_completed_session_is_409() {
    let app = fresh_app();
    let (id, _) = start(&app).await;
    complete(&app, &id, |_| None).await;
    let (status, body) = call(&app, "POST", &format!("/sessions/{id}/message"), Some(&message("more"))).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(json(&body)["code"], "session_completed");
    let (_, body) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(json(&body)["status"], "completed");
}

#[tokio::test]
async fn poor_wellbeing_branch_inserts_probes() {
    let app = fresh_app();
    let (id, _) = start(&app).await;
    let asked = complete(&app, &id, |q| q.starts_with("WHO5").then(|| "0".into())).await;
    let pos = |q: &str| asked.iter().position(|x| x == q);
    let probe = pos("PROBE_WELLBEING").expect("probe asked");
    assert_eq!(pos("PROBE_SUPPORT"), Some(probe + 1));
    assert!(probe > pos("WHO5_Q5").unwrap());

    let (calm, _) = start(&app).await;
    let asked = complete(&app, &calm, |q| q.starts_with("WHO5").then(|| "5".into())).await;
    assert!(!asked.iter().any(|q| q.starts_with("PROBE_WELLBEING")));
}

#[tokio::test]
async fn exported_session_is_anonymized() {
    let app = fresh_app();
    let (id, _) = start(&app).await;
    let raw = "Talk to Priya Sharma at priya.sharma@example.org or 555-123-4567";
    call(&app, "POST", &format!("/sessions/{id}/message"), Some(&message(raw))).await;
    let (status, body) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(status, StatusCode::OK);
    let text = String::from_utf8(body).unwrap();
    for secret in ["Priya Sharma", "priya.sharma@example.org", "555-123-4567"] {
        assert!(!text.contains(secret), "{secret} leaked: {text}");
    }
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(
        v["answers"]["Q1"]["value"]["text"],
        "Talk to [REDACTED:NAME] at [REDACTED:EMAIL] or [REDACTED:PHONE]"
    );
    // the record carries no transcript
    assert!(v.get("transcript").is_none());
}

#[tokio::test]
async fn scripts_and_health() {
    let app = fresh_app();
    let (status, body) = call(&app, "GET", "/scripts", None).await;
    assert_eq!(status, StatusCode::OK);
    let v = json(&body);
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["script_id"], SCRIPT_ID);
    assert_eq!(v[0]["title"], example_script().title);
    let (status, body) = call(&app, "GET", "/healthz", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(json(&body)["status"], "ok");
}

#[tokio::test]
async fn empty_store_report_has_zero_counts() {
    let app = fresh_app();
    let (status, body) = call(&app, "GET", &format!("/analytics/report?script_id={SCRIPT_ID}"), None).await;
    assert_eq!(status, StatusCode::OK);
    let v = json(&body);
    assert_eq!(v["script_id"], SCRIPT_ID);
    for (_, n) in v["sessions"].as_object().unwrap() {
        assert_eq!(n, 0);
    }
    assert_eq!(v["consistency"]["evaluated_sessions"], 0);
    for (_, idx) in v["indices"].as_object().unwrap() {
        assert_eq!(idx["scored"], 0);
    }
    for h in v["hypotheses"].as_array().unwrap() {
        assert_eq!(h["supports"], 0);
        assert_eq!(h["refutes"], 0);
    }
    assert_eq!(v["term_frequencies"].as_array().unwrap().len(), 0);
    // a single loaded script makes the parameter optional
    let (status, again) = call(&app, "GET", "/analytics/report", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(again, body);
    let (status, _) = call(&app, "GET", "/analytics/report?script_id=nope", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn report_endpoint_matches_cli_analyze_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sessions.ndjson");
    let (m, _) = manager(Some(Arc::new(Store::open(&path).unwrap())));
    let app = inquiry_service::router(app_state(m));
    for k in 0..5 {
        let (id, _) = start(&app).await;
        let who = if k % 2 == 0 { "1" } else { "4" };
        complete(&app, &id, |q| match q {
            _ if q.starts_with("WHO5") => Some(who.into()),
            "Q4" => Some(if k < 3 { "no" } else { "yes" }.into()),
            "Q6" => Some("therapy is expensive and I am afraid of being judged".into()),
            _ => None,
        })
        .await;
    }
    // one session left mid-way
    let (id, _) = start(&app).await;
    call(&app, "POST", &format!("/sessions/{id}/message"), Some(&message("money"))).await;

    let (status, http) = call(&app, "GET", &format!("/analytics/report?script_id={SCRIPT_ID}"), None).await;
    assert_eq!(status, StatusCode::OK);

    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(
        ["inquiry", "analyze", "--store", path.to_str().unwrap()],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
    assert_eq!(out, http);
    let v = json(&http);
    assert_eq!(v["sessions"]["completed"], 5);
    assert_eq!(v["sessions"]["active"], 1);
}

#[tokio::test]
async fn store_restores_sessions_across_instances() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sessions.ndjson");
    let id = {
        let (m, _) = manager(Some(Arc::new(Store::open(&path).unwrap())));
        let app = inquiry_service::router(app_state(m));
        let (id, _) = start(&app).await;
        call(&app, "POST", &format!("/sessions/{id}/message"), Some(&message("exams"))).await;
        id
    };
    let (m, _) = manager(Some(Arc::new(Store::open(&path).unwrap())));
    let app = inquiry_service::router(app_state(m));
    let (status, body) = call(&app, "POST", &format!("/sessions/{id}/message"), Some(&message("2"))).await;
    assert_eq!(status, StatusCode::OK, "{}", String::from_utf8_lossy(&body));
    let (_, body) = call(&app, "GET", &format!("/sessions/{id}"), None).await;
    assert_eq!(json(&body)["answers"]["WHO5_Q1"]["value"]["scale"], 2);
}
