//! HTTP binding of the Safekeeper protocol. Every error response carries an
//! [`ErrorBody`] whose `error` field is a stable code.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use safekeeper_core::auth::Rejection;
use safekeeper_core::wire::{ErrorBody, QueryParams, RegisterToolRequest};
use safekeeper_core::{Principal, SignedEnvelope};

use crate::app::{Safekeeper, ServiceError};

pub fn router(app: Arc<Safekeeper>) -> Router {
    Router::new()
        .route("/api/log", post(submit).get(query_log))
        .route("/api/overview", get(overview))
        .route("/api/chain/head", get(chain_head))
        .route("/api/tools", post(register_tool).get(list_tools))
        .fallback(|| async { error_response(StatusCode::NOT_FOUND, "not-found", "no such endpoint".into()) })
        .with_state(app)
}

pub fn status_of(err: &ServiceError) -> StatusCode {
    match err {
        ServiceError::Rejected(r) => match r {
            Rejection::Malformed => StatusCode::BAD_REQUEST,
            Rejection::InvalidSignature => StatusCode::UNAUTHORIZED,
            Rejection::UnknownTool => StatusCode::FORBIDDEN,
            Rejection::ReplayedNonce => StatusCode::CONFLICT,
            Rejection::StaleTimestamp => StatusCode::UNPROCESSABLE_ENTITY,
        },
        ServiceError::Malformed(_) | ServiceError::BadFilter(_) => StatusCode::BAD_REQUEST,
        ServiceError::Unauthenticated => StatusCode::UNAUTHORIZED,
        ServiceError::Forbidden(_) => StatusCode::FORBIDDEN,
        ServiceError::DuplicateTool(_) => StatusCode::CONFLICT,
        ServiceError::Storage(_) => StatusCode::SERVICE_UNAVAILABLE,
    }
}

fn error_response(status: StatusCode, code: &str, message: String) -> Response {
    let body = ErrorBody {
        error: code.to_owned(),
        message,
    };
    (status, Json(body)).into_response()
}

struct ApiError(ServiceError);

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        error_response(status_of(&self.0), self.0.code(), self.0.to_string())
    }
}

type ApiResult<T> = Result<Json<T>, ApiError>;

fn bearer(headers: &HeaderMap) -> Option<&str> {
    let value = headers.get(header::AUTHORIZATION)?.to_str().ok()?;
    let (scheme, token) = value.split_once(' ')?;
    scheme.eq_ignore_ascii_case("bearer").then(|| token.trim())
}

fn principal(app: &Safekeeper, headers: &HeaderMap) -> Result<Principal, ServiceError> {
    app.authenticate(bearer(headers))
}

async fn submit(State(app): State<Arc<Safekeeper>>, body: Bytes) -> ApiResult<safekeeper_core::AppendReceipt> {
    let envelope: SignedEnvelope =
        serde_json::from_slice(&body).map_err(|e| ServiceError::Malformed(e.to_string()))?;
    // The append path fsyncs; keep it off the async workers.
    let receipt = tokio::task::spawn_blocking(move || app.submit(envelope))
        .await
        .map_err(|e| ServiceError::Storage(format!("append task failed: {e}")))??;
    Ok(Json(receipt))
}

async fn query_log(
    State(app): State<Arc<Safekeeper>>,
    headers: HeaderMap,
    params: Result<Query<QueryParams>, QueryRejection>,
) -> ApiResult<safekeeper_core::Page> {
    let principal = principal(&app, &headers)?;
    let Query(params) = params.map_err(|e| ServiceError::Malformed(e.body_text()))?;
    Ok(Json(app.query(&principal, params.into_filter())?))
}

async fn overview(State(app): State<Arc<Safekeeper>>, headers: HeaderMap) -> ApiResult<safekeeper_core::OverviewStats> {
    let principal = principal(&app, &headers)?;
    Ok(Json(app.overview(&principal)?))
}

async fn chain_head(State(app): State<Arc<Safekeeper>>, headers: HeaderMap) -> ApiResult<safekeeper_core::ChainState> {
    let principal = principal(&app, &headers)?;
    Ok(Json(app.chain_head(&principal)?))
}

async fn register_tool(
    State(app): State<Arc<Safekeeper>>,
    headers: HeaderMap,
    body: Bytes,
) -> Result<(StatusCode, Json<safekeeper_core::ToolIdentity>), ApiError> {
    let principal = principal(&app, &headers)?;
    let req: RegisterToolRequest =
        serde_json::from_slice(&body).map_err(|e| ServiceError::Malformed(e.to_string()))?;
    let identity = tokio::task::spawn_blocking(move || {
        app.register_tool(&principal, &req.tool_id, req.verification_key)
    })
    .await
    .map_err(|e| ServiceError::Storage(format!("registration task failed: {e}")))??;
    Ok((StatusCode::CREATED, Json(identity)))
}

async fn list_tools(
    State(app): State<Arc<Safekeeper>>,
    headers: HeaderMap,
) -> ApiResult<Vec<safekeeper_core::ToolIdentity>> {
    let principal = principal(&app, &headers)?;
    Ok(Json(app.tools(&principal)?))
}
