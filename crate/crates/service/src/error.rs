use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::{Deserialize, Serialize};

use inquiry_core::session::{SessionError, Status};

/// Body of every failed request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retry_message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiError {
    pub status: StatusCode,
    pub body: ErrorBody,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        Self {
            status,
            body: ErrorBody {
                code: code.to_string(),
                message: message.into(),
                retry_message: None,
            },
        }
    }

    pub fn malformed(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "malformed_body", message)
    }

    pub fn rejected(retry_message: String) -> Self {
        let mut e = Self::new(
            StatusCode::BAD_REQUEST,
            "rejected_utterance",
            "the reply does not fit the question",
        );
        e.body.retry_message = Some(retry_message);
        e
    }

    pub fn not_found(code: &str, message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, code, message)
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        match &e {
            SessionError::UnknownScript(_) => Self::not_found("script_not_found", e.to_string()),
            SessionError::UnknownSession(_) => Self::not_found("session_not_found", "session not found"),
            SessionError::NotActive { status } => {
                let code = match status {
                    Status::Completed => "session_completed",
                    Status::Abandoned => "session_abandoned",
                    Status::Active => "session_not_active",
                };
                Self::new(StatusCode::CONFLICT, code, e.to_string())
            }
            SessionError::Store(err) => {
                tracing::error!(error = %err, "store failure");
                Self::new(
                    StatusCode::INTERNAL_SERVER_ERROR,
                    "store_error",
                    "the session could not be saved",
                )
            }
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}
