//! In-memory datasets and jobs, with optional per-dataset JSON snapshots.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex, MutexGuard};

use rankfit_core::evalverify::ExplanationReport;
use rankfit_core::model::{GivenRanking, Relation};
use serde::{Deserialize, Serialize};
use tokio::sync::Semaphore;

use crate::api::SolveRequest;
use crate::error::ApiError;
use crate::Config;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JobState {
    Queued,
    Running,
    Done,
    Failed,
    Cancelled,
}

impl JobState {
    pub fn is_active(self) -> bool {
        matches!(self, Self::Queued | Self::Running)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct HistoryEntry {
    pub job_id: String,
    pub request: SolveRequest,
    pub report: ExplanationReport,
}

pub(crate) struct Dataset {
    pub name: String,
    pub relation: Arc<Relation>,
    pub ranking: Arc<GivenRanking>,
    pub history: Vec<HistoryEntry>,
    pub active_job: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct JobView {
    pub id: String,
    pub dataset_id: String,
    pub state: JobState,
    pub request: SolveRequest,
    pub report: Option<ExplanationReport>,
    pub error: Option<String>,
}

struct Job {
    view: JobView,
    cancel: Arc<AtomicBool>,
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    id: String,
    name: String,
    csv: String,
    ranking: String,
    explanations: Vec<HistoryEntry>,
}

#[derive(Default)]
struct Inner {
    datasets: HashMap<String, Dataset>,
    jobs: HashMap<String, Job>,
    next_id: u64,
}

impl Inner {
    fn fresh_id(&mut self, prefix: &str) -> String {
        self.next_id += 1;
        format!("{prefix}{}", self.next_id)
    }

    fn dataset(&self, id: &str) -> Result<&Dataset, ApiError> {
        self.datasets
            .get(id)
            .ok_or_else(|| ApiError::NotFound(format!("dataset `{id}`")))
    }
}

struct Shared {
    config: Config,
    inner: Mutex<Inner>,
    pool: Arc<Semaphore>,
}

/// Shared handle to the stores; cheap to clone.
#[derive(Clone)]
pub struct AppState(Arc<Shared>);

impl AppState {
    /// Creates the stores, reloading any snapshots found in the configured
    /// directory.
    pub fn new(config: Config) -> Result<Self, ApiError> {
        let mut inner = Inner::default();
        if let Some(dir) = &config.snapshot_dir {
            std::fs::create_dir_all(dir).map_err(|e| ApiError::Internal(format!("{}: {e}", dir.display())))?;
            load_snapshots(dir, &mut inner)?;
        }
        let workers = config.workers.max(1);
        Ok(Self(Arc::new(Shared {
            config,
            inner: Mutex::new(inner),
            pool: Arc::new(Semaphore::new(workers)),
        })))
    }

    pub fn config(&self) -> &Config {
        &self.0.config
    }

    fn lock(&self) -> MutexGuard<'_, Inner> {
        self.0.inner.lock().unwrap_or_else(|p| p.into_inner())
    }

    pub(crate) fn insert_dataset(&self, name: String, relation: Relation, ranking: GivenRanking) -> String {
        let (id, snapshot) = {
            let mut inner = self.lock();
            let id = inner.fresh_id("ds");
            let dataset = Dataset {
                name,
                relation: Arc::new(relation),
                ranking: Arc::new(ranking),
                history: Vec::new(),
                active_job: None,
            };
            let snapshot = self.snapshot_of(&id, &dataset);
            inner.datasets.insert(id.clone(), dataset);
            (id, snapshot)
        };
        self.persist(snapshot);
        id
    }

    /// Runs `f` on a dataset under the store lock.
    pub(crate) fn with_dataset<T>(&self, id: &str, f: impl FnOnce(&Dataset) -> T) -> Result<T, ApiError> {
        Ok(f(self.lock().dataset(id)?))
    }

    pub(crate) fn delete_dataset(&self, id: &str) -> Result<(), ApiError> {
        let mut inner = self.lock();
        let ds = inner.dataset(id)?;
        if let Some(job) = &ds.active_job {
            return Err(ApiError::Conflict(format!("job `{job}` is still running on dataset `{id}`")));
        }
        inner.datasets.remove(id);
        inner.jobs.retain(|_, j| j.view.dataset_id != id);
        drop(inner);
        if let Some(dir) = &self.0.config.snapshot_dir {
            let _ = std::fs::remove_file(snapshot_path(dir, id));
        }
        Ok(())
    }

    pub(crate) fn history(&self, id: &str) -> Result<Vec<HistoryEntry>, ApiError> {
        self.with_dataset(id, |d| d.history.clone())
    }

    pub(crate) fn job(&self, id: &str) -> Result<JobView, ApiError> {
        self.lock()
            .jobs
            .get(id)
            .map(|j| j.view.clone())
            .ok_or_else(|| ApiError::NotFound(format!("job `{id}`")))
    }

    /// Registers a queued job and runs `work` once a worker is free. Fails
    /// with a conflict if the dataset already has an active job.
    pub(crate) fn submit<F>(&self, dataset_id: &str, request: SolveRequest, work: F) -> Result<String, ApiError>
    where
        F: FnOnce(Arc<AtomicBool>) -> Result<ExplanationReport, String> + Send + 'static,
    {
        let cancel = Arc::new(AtomicBool::new(false));
        let job_id = {
            let mut inner = self.lock();
            if let Some(job) = &inner.dataset(dataset_id)?.active_job {
                return Err(ApiError::Conflict(format!(
                    "job `{job}` is still running on dataset `{dataset_id}`"
                )));
            }
            let job_id = inner.fresh_id("job");
            inner.jobs.insert(
                job_id.clone(),
                Job {
                    view: JobView {
                        id: job_id.clone(),
                        dataset_id: dataset_id.to_string(),
                        state: JobState::Queued,
                        request,
                        report: None,
                        error: None,
                    },
                    cancel: cancel.clone(),
                },
            );
            inner
                .datasets
                .get_mut(dataset_id)
                .expect("checked above")
                .active_job = Some(job_id.clone());
            job_id
        };

        let state = self.clone();
        let id = job_id.clone();
        tokio::spawn(async move {
            let Ok(_permit) = state.0.pool.clone().acquire_owned().await else {
                state.finish(&id, Err("worker pool closed".into()));
                return;
            };
            if !state.mark_running(&id) {
                return;
            }
            let result = tokio::task::spawn_blocking(move || work(cancel))
                .await
                .unwrap_or_else(|e| Err(format!("solver task failed: {e}")));
            state.finish(&id, result);
        });
        Ok(job_id)
    }

    /// Moves a queued job to running; false if it was cancelled meanwhile.
    fn mark_running(&self, id: &str) -> bool {
        let mut inner = self.lock();
        match inner.jobs.get_mut(id) {
            Some(job) if job.view.state == JobState::Queued => {
                job.view.state = JobState::Running;
                true
            }
            _ => false,
        }
    }

    fn finish(&self, id: &str, result: Result<ExplanationReport, String>) {
        let snapshot = {
            let mut inner = self.lock();
            let Some(job) = inner.jobs.get_mut(id) else {
                return;
            };
            let cancelled = job.cancel.load(Ordering::Relaxed);
            let entry = match result {
                Ok(report) => {
                    job.view.state = if cancelled { JobState::Cancelled } else { JobState::Done };
                    job.view.report = Some(report.clone());
                    Some(HistoryEntry {
                        job_id: id.to_string(),
                        request: job.view.request.clone(),
                        report,
                    })
                }
                Err(msg) => {
                    job.view.state = if cancelled { JobState::Cancelled } else { JobState::Failed };
                    job.view.error = Some(msg);
                    None
                }
            };
            let dataset_id = job.view.dataset_id.clone();
            let Some(ds) = inner.datasets.get_mut(&dataset_id) else {
                return;
            };
            if ds.active_job.as_deref() == Some(id) {
                ds.active_job = None;
            }
            match entry {
                Some(e) => {
                    ds.history.push(e);
                    self.snapshot_of(&dataset_id, ds)
                }
                None => None,
            }
        };
        self.persist(snapshot);
    }

    /// Requests cancellation. A queued job is cancelled at once; a running
    /// one stops at the solver's next check and keeps its best weights.
    pub(crate) fn cancel(&self, id: &str) -> Result<JobView, ApiError> {
        let mut inner = self.lock();
        let job = inner
            .jobs
            .get_mut(id)
            .ok_or_else(|| ApiError::NotFound(format!("job `{id}`")))?;
        job.cancel.store(true, Ordering::Relaxed);
        if job.view.state == JobState::Queued {
            job.view.state = JobState::Cancelled;
            let view = job.view.clone();
            if let Some(ds) = inner.datasets.get_mut(&view.dataset_id) {
                if ds.active_job.as_deref() == Some(id) {
                    ds.active_job = None;
                }
            }
            return Ok(view);
        }
        Ok(job.view.clone())
    }

    fn snapshot_of(&self, id: &str, ds: &Dataset) -> Option<(PathBuf, Snapshot)> {
        let dir = self.0.config.snapshot_dir.as_ref()?;
        Some((
            snapshot_path(dir, id),
            Snapshot {
                id: id.to_string(),
                name: ds.name.clone(),
                csv: ds.relation.to_csv_string(),
                ranking: ds.ranking.to_text(&ds.relation),
                explanations: ds.history.clone(),
            },
        ))
    }

    /// Writes a snapshot through a temporary file so readers never see a
    /// partial one. Failures are logged and otherwise ignored.
    fn persist(&self, snapshot: Option<(PathBuf, Snapshot)>) {
        let Some((path, snap)) = snapshot else {
            return;
        };
        let tmp = path.with_extension("json.tmp");
        let result = serde_json::to_vec(&snap)
            .map_err(std::io::Error::other)
            .and_then(|bytes| std::fs::write(&tmp, bytes))
            .and_then(|()| std::fs::rename(&tmp, &path));
        if let Err(e) = result {
            eprintln!("snapshot {}: {e}", path.display());
        }
    }
}

fn snapshot_path(dir: &Path, id: &str) -> PathBuf {
    dir.join(format!("{id}.json"))
}

fn id_number(id: &str) -> u64 {
    id.trim_start_matches(|c: char| !c.is_ascii_digit()).parse().unwrap_or(0)
}

fn load_snapshots(dir: &Path, inner: &mut Inner) -> Result<(), ApiError> {
    let entries = std::fs::read_dir(dir).map_err(|e| ApiError::Internal(format!("{}: {e}", dir.display())))?;
    for entry in entries.flatten() {
        let path = entry.path();
        if path.extension().is_none_or(|e| e != "json") {
            continue;
        }
        let bad = |msg: String| ApiError::Internal(format!("snapshot {}: {msg}", path.display()));
        let bytes = std::fs::read(&path).map_err(|e| bad(e.to_string()))?;
        let snap: Snapshot = serde_json::from_slice(&bytes).map_err(|e| bad(e.to_string()))?;
        let relation = Relation::from_csv_reader(snap.csv.as_bytes(), false).map_err(|e| bad(e.to_string()))?;
        let ranking = GivenRanking::parse(&relation, &snap.ranking).map_err(|e| bad(e.to_string()))?;
        let max_id = snap
            .explanations
            .iter()
            .map(|h| id_number(&h.job_id))
            .chain([id_number(&snap.id)])
            .max()
            .unwrap_or(0);
        inner.next_id = inner.next_id.max(max_id);
        inner.datasets.insert(
            snap.id,
            Dataset {
                name: snap.name,
                relation: Arc::new(relation),
                ranking: Arc::new(ranking),
                history: snap.explanations,
                active_job: None,
            },
        );
    }
    Ok(())
}
