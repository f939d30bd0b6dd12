//! Request and response bodies and the route handlers.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::Json;
use rankfit_core::approx::{cell_solve, SeedStrategy};
use rankfit_core::baselines::SampleBudget;
use rankfit_core::evalverify::{solve_with_escalation, Mode, SolveOptions};
use rankfit_core::formulate::{EpsilonConfig, WeightPredicate};
use rankfit_core::model::{GivenRanking, Relation, WeightVector};
use rankfit_core::{ObjectiveKind, ProblemSpec};
use serde::{Deserialize, Serialize};

use crate::error::ApiError;
use crate::store::{AppState, HistoryEntry, JobView};

const PREVIEW_ROWS: usize = 20;

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct UploadRequest {
    #[serde(default)]
    pub name: String,
    /// Relation CSV with an id column first.
    pub csv: String,
    /// Ranking text; when absent the CSV row order is the ranking.
    pub ranking: Option<String>,
    #[serde(default)]
    pub dedup: bool,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PreviewRow {
    pub id: String,
    pub rank: usize,
    pub attrs: Vec<f64>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DatasetInfo {
    pub id: String,
    pub name: String,
    pub attributes: Vec<String>,
    pub n: usize,
    pub m: usize,
    /// The first tuples of the given ranking.
    pub preview: Vec<PreviewRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolveMode {
    Sat,
    Opt,
    Cell,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EpsRequest {
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub tau: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellStrategy {
    Sample,
    Window,
    Lr,
    Ordreg,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CellRequest {
    pub strategy: CellStrategy,
    /// Half-width of the box around the seed.
    pub size: f64,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub window: Option<usize>,
    /// Seed weights for the explicit strategy.
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SolveRequest {
    pub mode: SolveMode,
    pub k: usize,
    /// Weight predicate lines.
    #[serde(default)]
    pub constraints: Vec<String>,
    /// Importance factor by tuple id.
    #[serde(default)]
    pub importance: BTreeMap<String, f64>,
    #[serde(default)]
    pub eps: EpsRequest,
    #[serde(default)]
    pub objective: ObjectiveKind,
    pub cell: Option<CellRequest>,
    /// Seconds.
    pub time_limit: Option<f64>,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct JobCreated {
    pub job_id: String,
}

#[derive(Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct History {
    pub dataset_id: String,
    pub explanations: Vec<HistoryEntry>,
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Result<T, ApiError> {
    payload
        .map(|Json(v)| v)
        .map_err(|e| ApiError::BadRequest(e.body_text()))
}

pub async fn create_dataset(
    State(state): State<AppState>,
    payload: Result<Json<UploadRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<DatasetInfo>), ApiError> {
    let req = body(payload)?;
    let max_rows = state.config().max_rows;
    // Cheap pre-check so oversized uploads are rejected before parsing.
    let lines = req.csv.lines().filter(|l| !l.trim().is_empty()).count();
    if lines.saturating_sub(1) > max_rows {
        return Err(ApiError::TooLarge(format!("at most {max_rows} rows may be uploaded")));
    }
    let relation = Relation::from_csv_reader(req.csv.as_bytes(), req.dedup)?;
    let ranking = match &req.ranking {
        Some(text) => GivenRanking::parse(&relation, text)?,
        None => GivenRanking::strict((0..relation.n()).collect())?,
    };
    let id = state.insert_dataset(req.name, relation, ranking);
    let info = state.with_dataset(&id, |d| info_of(&id, d))?;
    Ok((StatusCode::CREATED, Json(info)))
}

fn info_of(id: &str, d: &crate::store::Dataset) -> DatasetInfo {
    let rel = &d.relation;
    DatasetInfo {
        id: id.to_string(),
        name: d.name.clone(),
        attributes: rel.columns().to_vec(),
        n: rel.n(),
        m: rel.m(),
        preview: d
            .ranking
            .order()
            .iter()
            .take(PREVIEW_ROWS)
            .map(|&t| PreviewRow {
                id: rel.id(t).to_string(),
                rank: d.ranking.rank(t),
                attrs: rel.attrs(t).to_vec(),
            })
            .collect(),
    }
}

pub async fn get_dataset(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<DatasetInfo>, ApiError> {
    Ok(Json(state.with_dataset(&id, |d| info_of(&id, d))?))
}

pub async fn delete_dataset(State(state): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    state.delete_dataset(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

pub async fn explanations(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<History>, ApiError> {
    Ok(Json(History {
        explanations: state.history(&id)?,
        dataset_id: id,
    }))
}

pub async fn get_job(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<JobView>, ApiError> {
    Ok(Json(state.job(&id)?))
}

pub async fn cancel_job(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<JobView>, ApiError> {
    Ok(Json(state.cancel(&id)?))
}

pub async fn solve(
    State(state): State<AppState>,
    Path(id): Path<String>,
    payload: Result<Json<SolveRequest>, JsonRejection>,
) -> Result<(StatusCode, Json<JobCreated>), ApiError> {
    let req = body(payload)?;
    let (relation, ranking) = state.with_dataset(&id, |d| (d.relation.clone(), d.ranking.clone()))?;
    let spec = build_spec(&relation, &ranking, &req)?;
    let strategy = match req.mode {
        SolveMode::Cell => Some(cell_strategy(&req, &spec)?),
        _ => None,
    };
    let time_limit = match req.time_limit {
        Some(s) => Some(
            Duration::try_from_secs_f64(s)
                .map_err(|_| ApiError::BadRequest("timeLimit must be a nonnegative number of seconds".into()))?,
        ),
        None => state.config().default_time_limit,
    };
    let mode = req.mode;
    let half_width = req.cell.as_ref().map_or(0.0, |c| c.size);
    let job_id = state.submit(&id, req, move |cancel: Arc<AtomicBool>| {
        let opts = SolveOptions {
            time_limit,
            cancel: Some(cancel),
            ..SolveOptions::default()
        };
        let result = match (mode, strategy) {
            (SolveMode::Sat, _) => solve_with_escalation(&spec, Mode::Sat, &opts),
            (SolveMode::Opt, _) => solve_with_escalation(&spec, Mode::Opt, &opts),
            (SolveMode::Cell, Some(s)) => cell_solve(&spec, &s, half_width, &opts).map(|c| c.report),
            (SolveMode::Cell, None) => unreachable!("cell strategy is built before submission"),
        };
        result.map_err(|e| e.to_string())
    })?;
    Ok((StatusCode::ACCEPTED, Json(JobCreated { job_id })))
}

/// Validates a solve request against a dataset and builds its problem.
fn build_spec(relation: &Relation, ranking: &GivenRanking, req: &SolveRequest) -> Result<ProblemSpec, ApiError> {
    let mut eps = EpsilonConfig::default();
    if let Some(t) = req.eps.tau {
        eps.tau = t;
    }
    if let Some(e) = req.eps.eps1 {
        eps.eps1 = e;
    }
    if let Some(e) = req.eps.eps2 {
        eps.eps2 = e;
    }
    eps.validate()?;
    let predicate = WeightPredicate::parse(relation.columns(), &req.constraints)?;
    let importance: HashMap<String, f64> = req.importance.iter().map(|(k, v)| (k.clone(), *v)).collect();
    Ok(ProblemSpec::new(relation.clone(), ranking.clone(), req.k)?
        .with_predicate(predicate)?
        .with_importance(&importance)?
        .with_eps(eps)
        .with_objective(req.objective))
}

fn cell_strategy(req: &SolveRequest, spec: &ProblemSpec) -> Result<SeedStrategy, ApiError> {
    let cell = req
        .cell
        .as_ref()
        .ok_or_else(|| ApiError::BadRequest("mode `cell` needs a `cell` object".into()))?;
    if !(cell.size > 0.0) {
        return Err(ApiError::BadRequest("cell size must be positive".into()));
    }
    Ok(match cell.strategy {
        CellStrategy::Sample => SeedStrategy::Sampling {
            budget: SampleBudget::Count(cell.samples.unwrap_or(1000).max(1)),
            seed: cell.seed.unwrap_or(0),
        },
        CellStrategy::Window => {
            let window = cell.window.unwrap_or(spec.k.min(10));
            if window == 0 || window > spec.k.min(spec.relation.n()) {
                return Err(ApiError::BadRequest(format!("window must lie in 1..={}", spec.k)));
            }
            SeedStrategy::SlidingWindow { window }
        }
        CellStrategy::Lr => SeedStrategy::LinearRegression,
        CellStrategy::Ordreg => SeedStrategy::OrdinalRegression,
        CellStrategy::Explicit => {
            let w = cell
                .weights
                .clone()
                .ok_or_else(|| ApiError::BadRequest("strategy `explicit` needs `weights`".into()))?;
            if w.len() != spec.relation.m() {
                return Err(ApiError::BadRequest(format!("expected {} weights", spec.relation.m())));
            }
            SeedStrategy::Explicit(WeightVector::new(w)?)
        }
    })
}
