//! HTTP API for exploring alternative explanations of a ranking: upload a
//! dataset, solve with different weight constraints, and compare the
//! resulting reports.
//!
//! Solves run as background jobs on a bounded pool. Each dataset has at
//! most one active job, and its report history is append-only.

mod api;
mod error;
mod store;

use std::path::PathBuf;
use std::time::Duration;

use axum::extract::DefaultBodyLimit;
use axum::routing::{get, post};
use axum::Router;
use tower_http::services::ServeDir;

pub use api::{CellRequest, CellStrategy, EpsRequest, SolveMode, SolveRequest};
pub use error::ApiError;
pub use store::{AppState, JobState};

#[derive(Debug, Clone)]
pub struct Config {
    /// Largest accepted relation, in rows.
    pub max_rows: usize,
    /// Largest accepted request body, in bytes.
    pub max_body_bytes: usize,
    /// Solves allowed to run at once.
    pub workers: usize,
    /// Time limit for solves that do not set one.
    pub default_time_limit: Option<Duration>,
    /// Directory holding one JSON snapshot per dataset.
    pub snapshot_dir: Option<PathBuf>,
    /// Static files served at `/`.
    pub static_dir: Option<PathBuf>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            max_rows: 100_000,
            max_body_bytes: 64 << 20,
            workers: 2,
            default_time_limit: Some(Duration::from_secs(60)),
            snapshot_dir: None,
            static_dir: None,
        }
    }
}

pub fn router(state: AppState) -> Router {
    let static_dir = state.config().static_dir.clone();
    let limit = state.config().max_body_bytes;
    let api = Router::new()
        .route("/datasets", post(api::create_dataset))
        .route("/datasets/{id}", get(api::get_dataset).delete(api::delete_dataset))
        .route("/datasets/{id}/solve", post(api::solve))
        .route("/datasets/{id}/explanations", get(api::explanations))
        .route("/jobs/{id}", get(api::get_job).delete(api::cancel_job))
        .layer(DefaultBodyLimit::max(limit))
        .with_state(state);
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}
