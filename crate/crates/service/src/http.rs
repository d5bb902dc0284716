//! HTTP facade over contest engines.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, RwLock};

use axum::extract::{DefaultBodyLimit, Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tablebench_core::files::task_to_json;

use crate::engine::ContestEngine;
use crate::error::ServiceError;
use crate::types::{Payload, Stage, SubmissionStatus};

/// Store root; the server loads every contest found under it.
pub const DATA_DIR_ENV: &str = "BENCH_DATA_DIR";
/// host:port the server listens on.
pub const BIND_ENV: &str = "BENCH_BIND";

/// All contests the server fronts, keyed by contest id.
pub struct AppState {
    engines: RwLock<BTreeMap<String, ContestEngine>>,
}

impl AppState {
    pub fn new() -> Self {
        AppState {
            engines: RwLock::new(BTreeMap::new()),
        }
    }

    /// Loads every contest directory under `data_dir`.
    pub fn load(data_dir: &Path) -> Result<Self, ServiceError> {
        let state = AppState::new();
        if data_dir.exists() {
            let mut engines = state.engines.write().expect("lock poisoned");
            for entry in std::fs::read_dir(data_dir)? {
                let entry = entry?;
                if !entry.path().join("contest.json").exists() {
                    continue;
                }
                let contest_id = entry.file_name().to_string_lossy().to_string();
                let engine = ContestEngine::open(data_dir, &contest_id)?;
                engines.insert(contest_id, engine);
            }
        }
        Ok(state)
    }

    pub fn insert(&self, engine: ContestEngine) {
        self.engines
            .write()
            .expect("lock poisoned")
            .insert(engine.contest_id().to_string(), engine);
    }

    pub fn contest_ids(&self) -> Vec<String> {
        self.engines
            .read()
            .expect("lock poisoned")
            .keys()
            .cloned()
            .collect()
    }

    /// Largest request body any hosted contest accepts, plus envelope slack.
    fn body_cap(&self) -> usize {
        let engines = self.engines.read().expect("lock poisoned");
        let cap = engines
            .values()
            .map(|e| e.config().max_payload_bytes)
            .max()
            .unwrap_or(4 * 1024 * 1024) as usize;
        cap + 64 * 1024
    }
}

impl Default for AppState {
    fn default() -> Self {
        Self::new()
    }
}

struct ApiError(ServiceError);

impl From<ServiceError> for ApiError {
    fn from(err: ServiceError) -> Self {
        ApiError(err)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            ServiceError::UnknownContest(_) | ServiceError::UnknownSubmission(_) => {
                StatusCode::NOT_FOUND
            }
            ServiceError::ContestClosed(_) | ServiceError::InvalidTransition { .. } => {
                StatusCode::CONFLICT
            }
            ServiceError::PayloadTooLarge { .. } => StatusCode::PAYLOAD_TOO_LARGE,
            ServiceError::TaskSetMismatch(_) | ServiceError::InvalidPayload(_) => {
                StatusCode::UNPROCESSABLE_ENTITY
            }
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(json!({ "error": self.0.to_string() }))).into_response()
    }
}

#[derive(Deserialize)]
struct SubmitBody {
    team_id: String,
    payload: Payload,
}

#[derive(Serialize)]
struct SubmitResponse {
    submission_id: String,
}

#[derive(Serialize)]
struct SubmissionView {
    submission_id: String,
    team_id: String,
    stage: Stage,
    received_at: String,
    status: SubmissionStatus,
}

/// Ingests a submission and evaluates it in line; the submission is durable
/// before evaluation starts, so a crash mid-evaluation never loses it.
async fn post_submission(
    State(state): State<Arc<AppState>>,
    UrlPath(contest_id): UrlPath<String>,
    Json(body): Json<SubmitBody>,
) -> Result<Json<SubmitResponse>, ApiError> {
    let mut engines = state.engines.write().expect("lock poisoned");
    let engine = engines
        .get_mut(&contest_id)
        .ok_or_else(|| ServiceError::UnknownContest(contest_id.clone()))?;
    let submission_id = engine.submit(&body.team_id, body.payload)?;
    engine.evaluate_submission(&submission_id)?;
    Ok(Json(SubmitResponse { submission_id }))
}

async fn get_submission(
    State(state): State<Arc<AppState>>,
    UrlPath(submission_id): UrlPath<String>,
) -> Result<Json<SubmissionView>, ApiError> {
    let engines = state.engines.read().expect("lock poisoned");
    for engine in engines.values() {
        if let Some(record) = engine.submission(&submission_id) {
            return Ok(Json(SubmissionView {
                submission_id: record.submission_id.clone(),
                team_id: record.team_id.clone(),
                stage: record.stage,
                received_at: record.received_at.clone(),
                status: record.status.clone(),
            }));
        }
    }
    Err(ServiceError::UnknownSubmission(submission_id).into())
}

async fn get_leaderboard(
    State(state): State<Arc<AppState>>,
    UrlPath(contest_id): UrlPath<String>,
) -> Result<Response, ApiError> {
    let engines = state.engines.read().expect("lock poisoned");
    let engine = engines
        .get(&contest_id)
        .ok_or_else(|| ServiceError::UnknownContest(contest_id.clone()))?;
    Ok(Json(engine.leaderboard()?).into_response())
}

async fn get_tasks(
    State(state): State<Arc<AppState>>,
    UrlPath(contest_id): UrlPath<String>,
) -> Result<Response, ApiError> {
    let engines = state.engines.read().expect("lock poisoned");
    let engine = engines
        .get(&contest_id)
        .ok_or_else(|| ServiceError::UnknownContest(contest_id.clone()))?;
    let tasks: Result<Vec<serde_json::Value>, ServiceError> = engine
        .active_tasks()
        .iter()
        .map(|t| Ok(serde_json::from_str(&task_to_json(t))?))
        .collect();
    Ok(Json(json!({ "stage": engine.stage(), "tasks": tasks? })).into_response())
}

/// Routes, all under `/v1`.
pub fn router(state: Arc<AppState>) -> Router {
    let cap = state.body_cap();
    Router::new()
        .route("/v1/contests/{id}/submissions", post(post_submission))
        .route("/v1/contests/{id}/leaderboard", get(get_leaderboard))
        .route("/v1/contests/{id}/tasks", get(get_tasks))
        .route("/v1/submissions/{id}", get(get_submission))
        .layer(DefaultBodyLimit::max(cap))
        .with_state(state)
}

/// Serves until interrupted.
pub async fn serve(state: Arc<AppState>, listener: tokio::net::TcpListener) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
