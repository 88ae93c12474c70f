//! HTTP service over the store and graph engine.
//!
//! Bodies are canonical json. Responses for single entities carry
//! `ETag: <version>`; requests that change or delete an existing entity must
//! send `If-Match: <version>` of that entity (the view, for view
//! sub-resources). Creating new entities needs no precondition.

mod error;
mod handlers;

use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::PathBuf;
use std::sync::Arc;

use axum::extract::{Request, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::Router;
use serde::Serialize;

pub use error::{status_for, ApiError};

use crate::store::{Bundle, ImportMode, Store, StoreError};

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<Store>,
    auth_token: Option<Arc<str>>,
}

impl AppState {
    pub fn new(store: Arc<Store>) -> Self {
        Self {
            store,
            auth_token: None,
        }
    }

    /// Requires `Authorization: Bearer <token>` on every request.
    pub fn with_auth_token(mut self, token: Option<String>) -> Self {
        self.auth_token = token.map(Arc::from);
        self
    }
}

pub fn router(state: AppState) -> Router {
    use handlers::*;
    Router::new()
        .route("/pattern-languages", get(list_languages).post(create_language))
        .route(
            "/pattern-languages/{id}",
            get(get_language).put(put_language).delete(delete_language),
        )
        .route(
            "/pattern-languages/{id}/patterns",
            get(list_patterns).post(create_pattern),
        )
        .route(
            "/pattern-languages/{id}/relations",
            get(list_language_relations).post(create_language_relation),
        )
        .route(
            "/patterns/{*id}",
            get(get_pattern).put(put_pattern).delete(delete_pattern),
        )
        .route("/pattern-views", get(list_views).post(create_view))
        .route("/pattern-views/{id}", get(get_view).put(put_view).delete(delete_view))
        .route(
            "/pattern-views/{id}/patterns/{*pattern_id}",
            post(add_view_member).delete(remove_view_member),
        )
        .route("/pattern-views/{id}/referenced-relations", post(reference_relation))
        .route(
            "/pattern-views/{id}/relations",
            get(list_view_relations).post(create_view_relation),
        )
        .route("/pattern-views/{id}/graph", get(view_graph))
        .route("/pattern-views/{id}/neighborhood", get(view_neighborhood))
        .route("/pattern-views/{id}/diagnostics", get(view_diagnostics))
        .route("/export", get(export))
        .route("/import", post(import))
        .fallback(|| async { ApiError::new("NotFound", "no such resource", "") })
        .layer(middleware::from_fn_with_state(state.clone(), authorize))
        .with_state(state)
}

async fn authorize(State(state): State<AppState>, request: Request, next: Next) -> Response {
    if let Some(token) = &state.auth_token {
        let presented = request
            .headers()
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "));
        if presented != Some(token.as_ref()) {
            return ApiError::new("Unauthorized", "missing or wrong bearer token", "").into_response();
        }
    }
    next.run(request).await
}

pub(crate) fn json_response<T: Serialize>(status: StatusCode, body: &T, etag: Option<u64>) -> Response {
    let bytes = crate::canonical::to_vec(body).expect("response bodies serialize");
    let mut response = (status, bytes).into_response();
    let headers = response.headers_mut();
    headers.insert(header::CONTENT_TYPE, HeaderValue::from_static("application/json"));
    if let Some(version) = etag {
        headers.insert(header::ETAG, HeaderValue::from(version));
    }
    response
}

/// Version from `If-Match`. Accepts `3`, `"3"` and `W/"3"`.
pub fn if_match(headers: &HeaderMap) -> Result<u64, ApiError> {
    let raw = headers.get(header::IF_MATCH).ok_or_else(|| {
        ApiError::new(
            "PreconditionRequired",
            "this request needs an If-Match header with the entity version",
            "",
        )
    })?;
    let text = raw
        .to_str()
        .map_err(|_| ApiError::bad_request("If-Match is not ASCII"))?
        .trim();
    let text = text.strip_prefix("W/").unwrap_or(text).trim_matches('"');
    text.parse()
        .map_err(|_| ApiError::bad_request(format!("If-Match `{text}` is not a version number")))
}

#[derive(Clone, Debug)]
pub struct ServeConfig {
    pub bind: IpAddr,
    pub port: u16,
    /// State file; in-memory when absent.
    pub db_path: Option<PathBuf>,
    /// Bundle loaded at startup when the store is empty.
    pub corpus: Option<PathBuf>,
    pub auth_token: Option<String>,
}

impl Default for ServeConfig {
    fn default() -> Self {
        Self {
            bind: IpAddr::V4(Ipv4Addr::LOCALHOST),
            port: 8080,
            db_path: None,
            corpus: None,
            auth_token: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("cannot read corpus `{path}`: {source}")]
    Corpus { path: PathBuf, source: std::io::Error },
    #[error("server I/O failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Opens the configured store and preloads the corpus bundle into it.
pub fn open_store(config: &ServeConfig) -> Result<Store, ServeError> {
    let store = match &config.db_path {
        Some(path) => Store::open(path)?,
        None => Store::in_memory(),
    };
    if let Some(path) = &config.corpus {
        if store.snapshot().is_empty() {
            let bytes = std::fs::read(path).map_err(|source| ServeError::Corpus {
                path: path.clone(),
                source,
            })?;
            let report = store.import(&Bundle::from_json(&bytes)?, ImportMode::Strict)?;
            tracing::info!(patterns = report.imported.patterns, "corpus loaded");
        } else {
            tracing::warn!("store is not empty; corpus not loaded");
        }
    }
    Ok(store)
}

/// Serves until ctrl-c.
pub async fn serve(config: ServeConfig) -> Result<(), ServeError> {
    let store = Arc::new(open_store(&config)?);
    let app = router(AppState::new(store).with_auth_token(config.auth_token.clone()));
    let listener = tokio::net::TcpListener::bind(SocketAddr::new(config.bind, config.port)).await?;
    tracing::info!(address = %listener.local_addr()?, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
