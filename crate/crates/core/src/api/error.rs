use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use serde::{Deserialize, Serialize};

use crate::graph::GraphError;
use crate::model::ModelError;
use crate::store::StoreError;

/// Error body of every failed request. `code` is the code of the module
/// error that caused it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ApiError {
    pub http_status: u16,
    pub code: String,
    pub message: String,
    pub subject: String,
}

/// Fixed code to status mapping. Codes not listed map to 422.
///
/// | status | codes |
/// |---|---|
/// | 400 | MalformedBody, BadRequest, UnsupportedFormat, MalformedBundle |
/// | 401 | Unauthorized |
/// | 404 | NotFound, UnknownEntity, UnknownLanguage, NotMember |
/// | 409 | VersionConflict, DuplicateId, DuplicateRelation, AlreadyMember, AlreadyReferenced, PatternInUse, LanguageNotEmpty, NonEmptyStore |
/// | 428 | PreconditionRequired |
/// | 500 | Io |
/// | 422 | everything else, e.g. IntegrityViolation, SchemaViolation, EndpointNotInView |
pub fn status_for(code: &str) -> StatusCode {
    match code {
        "MalformedBody" | "BadRequest" | "UnsupportedFormat" | "MalformedBundle" => StatusCode::BAD_REQUEST,
        "Unauthorized" => StatusCode::UNAUTHORIZED,
        "NotFound" | "UnknownEntity" | "UnknownLanguage" | "NotMember" => StatusCode::NOT_FOUND,
        "VersionConflict" | "DuplicateId" | "DuplicateRelation" | "AlreadyMember" | "AlreadyReferenced"
        | "PatternInUse" | "LanguageNotEmpty" | "NonEmptyStore" => StatusCode::CONFLICT,
        "PreconditionRequired" => StatusCode::PRECONDITION_REQUIRED,
        "Io" => StatusCode::INTERNAL_SERVER_ERROR,
        _ => StatusCode::UNPROCESSABLE_ENTITY,
    }
}

impl ApiError {
    pub fn new(code: &str, message: impl Into<String>, subject: impl Into<String>) -> Self {
        Self {
            http_status: status_for(code).as_u16(),
            code: code.to_owned(),
            message: message.into(),
            subject: subject.into(),
        }
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new("BadRequest", message, "")
    }

    pub fn malformed_body(message: impl Into<String>) -> Self {
        Self::new("MalformedBody", message, "")
    }

    pub fn status(&self) -> StatusCode {
        StatusCode::from_u16(self.http_status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR)
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        if matches!(e, StoreError::Io(_)) {
            tracing::error!(error = %e, "storage failure");
        }
        ApiError::new(e.code(), e.to_string(), e.subject())
    }
}

impl From<ModelError> for ApiError {
    fn from(e: ModelError) -> Self {
        ApiError::new(e.code(), e.to_string(), e.subject())
    }
}

impl From<GraphError> for ApiError {
    fn from(e: GraphError) -> Self {
        ApiError::new(e.code(), e.to_string(), e.subject())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        super::json_response(self.status(), &self, None)
    }
}
