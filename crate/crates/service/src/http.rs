use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::json;

use crate::study::{Study, StudyError};

#[derive(Clone)]
pub struct AppState {
    pub study: Arc<Study>,
    pub consent: Option<Arc<str>>,
    pub admin_token: Option<Arc<str>>,
}

/// Error body: `{"error":{"code":..,"message":..}}`.
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }
}

impl From<StudyError> for ApiError {
    fn from(e: StudyError) -> Self {
        if e.http_status() >= 500 {
            log::error!("{e}");
        }
        ApiError {
            status: StatusCode::from_u16(e.http_status())
                .unwrap_or(StatusCode::INTERNAL_SERVER_ERROR),
            code: e.code(),
            message: e.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"error": {"code": self.code, "message": self.message}});
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "invalid_request", e.to_string()))
}

/// Runs a mutating study call off the async executor: it blocks on the
/// study lock and an fsync.
async fn blocking<T, F>(state: &AppState, f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce(&Study) -> Result<T, StudyError> + Send + 'static,
{
    let study = state.study.clone();
    tokio::task::spawn_blocking(move || f(&study))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string()))?
        .map_err(ApiError::from)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ChoiceBody {
    trial_id: String,
    chosen: String,
    rt_ms: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RatingBody {
    trial_id: String,
    rating: serde_json::Value,
    rt_ms: f64,
}

async fn create_session(State(st): State<AppState>) -> ApiResult<impl IntoResponse> {
    let s = blocking(&st, |study| study.create_session()).await?;
    Ok((StatusCode::CREATED, Json(s)))
}

async fn next_trial(
    State(st): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<impl IntoResponse> {
    Ok(Json(st.study.next_trial(&id)?))
}

async fn submit_choice(
    State(st): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    let b: ChoiceBody = parse_body(&body)?;
    let ack = blocking(&st, move |study| {
        study.submit_choice(&id, &b.trial_id, &b.chosen, b.rt_ms)
    })
    .await?;
    Ok(Json(ack))
}

async fn submit_rating(
    State(st): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<impl IntoResponse> {
    let b: RatingBody = parse_body(&body)?;
    let ack = blocking(&st, move |study| {
        study.submit_rating(&id, &b.trial_id, &b.rating, b.rt_ms)
    })
    .await?;
    Ok(Json(ack))
}

fn csv_response(text: String) -> Response {
    ([(header::CONTENT_TYPE, "text/csv; charset=utf-8")], text).into_response()
}

async fn export_judgments(State(st): State<AppState>) -> ApiResult<Response> {
    Ok(csv_response(st.study.export_judgments()?))
}

async fn export_ratings(State(st): State<AppState>) -> ApiResult<Response> {
    Ok(csv_response(st.study.export_ratings()?))
}

async fn health(State(st): State<AppState>) -> impl IntoResponse {
    Json(json!({"status": "ok", "study": st.study.status()}))
}

async fn consent(State(st): State<AppState>) -> ApiResult<Response> {
    match &st.consent {
        Some(text) => Ok((
            [(header::CONTENT_TYPE, "text/plain; charset=utf-8")],
            text.to_string(),
        )
            .into_response()),
        None => Err(ApiError::new(
            StatusCode::NOT_FOUND,
            "no_consent",
            "no consent text configured",
        )),
    }
}

fn check_admin(st: &AppState, headers: &HeaderMap) -> ApiResult<()> {
    let Some(token) = &st.admin_token else {
        return Err(ApiError::new(
            StatusCode::NOT_FOUND,
            "admin_disabled",
            "admin routes are disabled",
        ));
    };
    let given = headers
        .get(header::AUTHORIZATION)
        .and_then(|v| v.to_str().ok())
        .and_then(|v| v.strip_prefix("Bearer "));
    if given == Some(&**token) {
        Ok(())
    } else {
        Err(ApiError::new(
            StatusCode::UNAUTHORIZED,
            "unauthorized",
            "missing or wrong admin token",
        ))
    }
}

async fn release(
    State(st): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
) -> ApiResult<impl IntoResponse> {
    check_admin(&st, &headers)?;
    let s = blocking(&st, move |study| study.release(&id)).await?;
    Ok(Json(json!({"released": s})))
}

async fn fallback() -> ApiError {
    ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such route")
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/trial", get(next_trial))
        .route("/sessions/{id}/choice", post(submit_choice))
        .route("/sessions/{id}/rating", post(submit_rating))
        .route("/export/judgments.csv", get(export_judgments))
        .route("/export/ratings.csv", get(export_ratings))
        .route("/health", get(health))
        .route("/consent", get(consent))
        .route("/admin/sessions/{id}/release", post(release))
        .fallback(fallback)
        .with_state(state)
}
