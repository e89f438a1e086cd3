use std::collections::HashMap;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};

use inquiry_core::analytics::{build_report, ReportOptions};
use inquiry_core::session::SessionManager;

use crate::error::ApiError;

#[derive(Clone)]
pub struct AppState {
    pub manager: Arc<SessionManager>,
    pub report_options: Arc<ReportOptions>,
}

#[derive(Debug, Deserialize)]
struct StartRequest {
    script_id: String,
}

#[derive(Debug, Deserialize)]
struct MessageRequest {
    text: String,
}

#[derive(Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ScriptSummary {
    pub script_id: String,
    pub title: String,
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::malformed(format!("invalid request body: {e}")))
}

async fn start_session(State(app): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: StartRequest = parse_body(&body)?;
    let started = app.manager.start_session(&req.script_id)?;
    Ok((StatusCode::CREATED, Json(started)).into_response())
}

async fn post_message(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Response, ApiError> {
    // unknown sessions are reported before body problems
    app.manager.state(&id)?;
    let req: MessageRequest = parse_body(&body)?;
    let reply = app.manager.submit_utterance(&id, &req.text)?;
    if !reply.accepted {
        return Err(ApiError::rejected(reply.retry_message.unwrap_or_default()));
    }
    Ok(Json(reply).into_response())
}

async fn get_session(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(app.manager.export_session(&id)?).into_response())
}

async fn list_scripts(State(app): State<AppState>) -> Json<Vec<ScriptSummary>> {
    Json(
        app.manager
            .scripts()
            .map(|s| ScriptSummary {
                script_id: s.script_id.clone(),
                title: s.title.clone(),
            })
            .collect(),
    )
}

/// Report JSON for one script, byte-identical to `inquiry analyze` on the
/// same sessions.
pub fn report_json(app: &AppState, script_id: &str) -> Result<String, ApiError> {
    let script = app
        .manager
        .script(script_id)
        .ok_or_else(|| ApiError::not_found("script_not_found", format!("script not found: {script_id}")))?;
    let snapshot = app.manager.snapshot(Some(script_id));
    Ok(build_report(script, &snapshot, &app.report_options).to_json())
}

async fn analytics_report(
    State(app): State<AppState>,
    Query(params): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let script_id = match params.get("script_id") {
        Some(id) => id.clone(),
        None => {
            let ids: Vec<String> = app.manager.scripts().map(|s| s.script_id.clone()).collect();
            match ids.as_slice() {
                [only] => only.clone(),
                _ => return Err(ApiError::malformed("query parameter script_id is required")),
            }
        }
    };
    let body = report_json(&app, &script_id)?;
    Ok(([(header::CONTENT_TYPE, "application/json")], body).into_response())
}

async fn healthz() -> Json<serde_json::Value> {
    Json(serde_json::json!({"status": "ok"}))
}

async fn not_found() -> ApiError {
    ApiError::not_found("not_found", "no such endpoint")
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(start_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/message", post(post_message))
        .route("/scripts", get(list_scripts))
        .route("/analytics/report", get(analytics_report))
        .route("/healthz", get(healthz))
        .fallback(not_found)
        .with_state(state)
}
