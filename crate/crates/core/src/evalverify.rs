//! Position-error metrics, certificate verification and the solve drivers
//! that retry with a larger strict-gap threshold when verification fails.

use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::Duration;

use rankfit_lp::{solve_lp, solve_milp, MilpHooks, SolverConfig, Status};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::baselines::ordinal_regression_weights;
use crate::formulate::{build_opt, build_sat, EpsilonConfig};
use crate::model::{scores, GivenRanking, Relation, ScoredRanking, WeightVector};
use crate::problem::{ObjectiveKind, ProblemSpec};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleError {
    pub id: String,
    pub given_rank: usize,
    pub achieved_rank: usize,
    pub importance: f64,
    /// `importance · |achieved − given|`.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBreakdown {
    pub total: f64,
    /// Largest weighted per-tuple error.
    pub max: f64,
    pub per_tuple: Vec<TupleError>,
}

impl ErrorBreakdown {
    pub fn objective(&self, kind: ObjectiveKind) -> f64 {
        match kind {
            ObjectiveKind::Sum => self.total,
            ObjectiveKind::Max => self.max,
        }
    }
}

/// Weighted position error of the tuples in `top_k` under weights `w`, with
/// score ties decided by `tie_tol`.
pub fn position_error_of(
    relation: &Relation,
    ranking: &GivenRanking,
    top_k: &[usize],
    importance: &[f64],
    w: &[f64],
    tie_tol: f64,
) -> ErrorBreakdown {
    let scored = ScoredRanking::from_scores(scores(relation, w), tie_tol);
    let per_tuple: Vec<TupleError> = top_k
        .iter()
        .map(|&r| {
            let given = ranking.rank(r);
            let achieved = scored.ranks[r];
            TupleError {
                id: relation.id(r).to_string(),
                given_rank: given,
                achieved_rank: achieved,
                importance: importance[r],
                error: importance[r] * given.abs_diff(achieved) as f64,
            }
        })
        .collect();
    ErrorBreakdown {
        total: per_tuple.iter().map(|t| t.error).sum(),
        max: per_tuple.iter().map(|t| t.error).fold(0.0, f64::max),
        per_tuple,
    }
}

pub fn position_error(spec: &ProblemSpec, w: &[f64], tie_tol: f64) -> ErrorBreakdown {
    position_error_of(&spec.relation, &spec.ranking, spec.top_k(), &spec.importance, w, tie_tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    /// Pairs (r in top-k, s anywhere) whose score order (above, tied or
    /// below) disagrees with the given ranking.
    pub inversions: usize,
    pub max_position_error: usize,
}

pub fn metrics(relation: &Relation, ranking: &GivenRanking, top_k: &[usize], w: &[f64], tie_tol: f64) -> Metrics {
    let sc = scores(relation, w);
    let scored = ScoredRanking::from_scores(sc.clone(), tie_tol);
    let mut in_top = vec![usize::MAX; relation.n()];
    for (pos, &r) in top_k.iter().enumerate() {
        in_top[r] = pos;
    }
    let cmp_scores = |a: usize, b: usize| {
        if sc[a] > sc[b] + tie_tol {
            1
        } else if sc[b] > sc[a] + tie_tol {
            -1
        } else {
            0
        }
    };
    let mut inversions = 0;
    for (pos, &r) in top_k.iter().enumerate() {
        for s in 0..relation.n() {
            if s == r || (in_top[s] != usize::MAX && in_top[s] < pos) {
                continue;
            }
            let given = match ranking.rank(r).cmp(&ranking.rank(s)) {
                std::cmp::Ordering::Less => 1,
                std::cmp::Ordering::Greater => -1,
                std::cmp::Ordering::Equal => 0,
            };
            if given != cmp_scores(r, s) {
                inversions += 1;
            }
        }
    }
    let max_position_error = top_k
        .iter()
        .map(|&r| ranking.rank(r).abs_diff(scored.ranks[r]))
        .max()
        .unwrap_or(0);
    Metrics {
        inversions,
        max_position_error,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReportStatus {
    Satisfiable,
    Unsatisfiable,
    Optimal,
    TimeoutBest,
    /// Budget exhausted without any admissible weight vector.
    Timeout,
    /// The weight constraints admit no solution at all.
    Infeasible,
    /// The engine hit a numerical limit.
    Failed,
    /// Weights given explicitly or found by a heuristic, with no optimality
    /// claim.
    Evaluated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationReport {
    pub schema: u32,
    pub method: String,
    pub status: ReportStatus,
    pub k: usize,
    pub objective_kind: ObjectiveKind,
    pub attributes: Vec<String>,
    pub weights: Option<Vec<f64>>,
    /// Error recomputed from scores with tie tolerance `eps.tau`.
    pub total_error: Option<f64>,
    pub max_error: Option<f64>,
    /// Objective value reported by the solver.
    pub objective: Option<f64>,
    pub best_bound: Option<f64>,
    pub per_tuple: Vec<TupleError>,
    pub metrics: Option<Metrics>,
    pub eps: EpsilonConfig,
    pub verified: bool,
    pub escalations: usize,
    pub nodes: usize,
    pub iterations: usize,
    pub notes: Vec<String>,
}

impl ExplanationReport {
    pub fn new(spec: &ProblemSpec, method: impl Into<String>, status: ReportStatus) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            method: method.into(),
            status,
            k: spec.k,
            objective_kind: spec.objective,
            attributes: spec.relation.columns().to_vec(),
            weights: None,
            total_error: None,
            max_error: None,
            objective: None,
            best_bound: None,
            per_tuple: Vec::new(),
            metrics: None,
            eps: spec.eps,
            verified: false,
            escalations: 0,
            nodes: 0,
            iterations: 0,
            notes: Vec::new(),
        }
    }

    /// Report for an explicitly given weight vector (no solver involved).
    pub fn for_weights(spec: &ProblemSpec, method: impl Into<String>, w: &WeightVector) -> Self {
        let mut report = Self::new(spec, method, ReportStatus::Evaluated);
        report.attach_weights(spec, w.as_slice().to_vec());
        report.objective = report.error_value();
        report.verified = verify(&report, spec);
        report
    }

    /// Stores `w` and the error figures derived from it.
    pub fn attach_weights(&mut self, spec: &ProblemSpec, w: Vec<f64>) {
        let tau = spec.eps.tau;
        let err = position_error(spec, &w, tau);
        self.metrics = Some(metrics(&spec.relation, &spec.ranking, spec.top_k(), &w, tau));
        self.total_error = Some(err.total);
        self.max_error = Some(err.max);
        self.per_tuple = err.per_tuple;
        self.weights = Some(w);
    }

    /// Score-derived error under the report's objective kind.
    pub fn error_value(&self) -> Option<f64> {
        match self.objective_kind {
            ObjectiveKind::Sum => self.total_error,
            ObjectiveKind::Max => self.max_error,
        }
    }

    pub fn has_weights(&self) -> bool {
        self.weights.is_some()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Checks a report's certificate against the problem, deciding score ties
/// with tolerance `tau`. Exact-reproduction reports must have zero error;
/// optimization reports must have a score-derived error equal to the solver
/// objective. Reports without weights never verify.
pub fn verify(report: &ExplanationReport, spec: &ProblemSpec) -> bool {
    let Some(w) = &report.weights else {
        return false;
    };
    let tau = spec.eps.tau;
    if w.len() != spec.relation.m() || !spec.predicate.admits(w, tau) {
        return false;
    }
    let in_simplex = w.iter().all(|&x| x >= -tau) && (w.iter().sum::<f64>() - 1.0).abs() <= tau;
    let in_box = match spec.weight_box() {
        Ok(b) => w.iter().zip(&b).all(|(&x, &(lo, hi))| x >= lo - tau && x <= hi + tau),
        Err(_) => false,
    };
    if !in_simplex || !in_box {
        return false;
    }
    let err = position_error(spec, w, tau);
    match report.status {
        ReportStatus::Satisfiable => err.total == 0.0,
        ReportStatus::Optimal | ReportStatus::TimeoutBest | ReportStatus::Failed | ReportStatus::Evaluated => match report.objective {
            Some(obj) => (err.objective(spec.objective) - obj).abs() <= 1e-6 * obj.abs().max(1.0),
            None => false,
        },
        _ => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sat,
    Opt,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<usize>,
    pub cancel: Option<Arc<AtomicBool>>,
    /// Skip indicator variables for pairs fixed by dominance.
    pub prune: bool,
    /// Use the exact-reproduction LP to seed or lower-bound the search.
    pub exact_precheck: bool,
    /// Weight vector offered as the first incumbent.
    pub start: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            time_limit: None,
            node_limit: None,
            cancel: None,
            prune: true,
            exact_precheck: true,
            start: None,
        }
    }
}

impl SolveOptions {
    fn solver_config(&self, spec: &ProblemSpec) -> SolverConfig {
        SolverConfig {
            feasibility_tol: spec.eps.tau,
            time_limit: self.time_limit,
            node_limit: self.node_limit,
            cancel: self.cancel.clone(),
            ..SolverConfig::default()
        }
    }
}

/// Decides whether some admissible weight vector reproduces the top-k.
pub fn solve_sat(spec: &ProblemSpec, opts: &SolveOptions) -> Result<ExplanationReport> {
    let (program, layout) = build_sat(spec)?;
    let sol = solve_lp(&program, &opts.solver_config(spec))?;
    let status = match sol.status {
        Status::Optimal => ReportStatus::Satisfiable,
        Status::Infeasible => ReportStatus::Unsatisfiable,
        Status::Timeout | Status::TimeoutBest => ReportStatus::Timeout,
        Status::Unbounded | Status::NumericalFailure => ReportStatus::Failed,
    };
    let mut report = ExplanationReport::new(spec, "sat", status);
    report.nodes = sol.nodes;
    report.iterations = sol.iterations;
    if let Some(msg) = &sol.message {
        report.notes.push(msg.clone());
    }
    if status == ReportStatus::Satisfiable {
        let w: Vec<f64> = layout.weights.iter().map(|&v| sol.value(v)).collect();
        report.attach_weights(spec, WeightVector::project(&w).as_slice().to_vec());
        report.objective = Some(0.0);
        report.verified = verify(&report, spec);
    }
    if status == ReportStatus::Unsatisfiable {
        report
            .notes
            .push("no admissible weight vector reproduces the top-k with the current eps1".into());
    }
    Ok(report)
}

/// Finds a weight vector minimizing position error.
pub fn solve_opt(spec: &ProblemSpec, opts: &SolveOptions) -> Result<ExplanationReport> {
    let (program, layout) = build_opt(spec, opts.prune)?;
    let mut config = opts.solver_config(spec);
    config.objective_step = spec.objective_step();
    let tau = spec.eps.tau;
    let mut notes = Vec::new();
    let mut start = opts
        .start
        .as_ref()
        .and_then(|w| layout.assignment_for(spec, &program, w, tau / 2.0));

    let top = spec.top_k();
    let min_importance = top.iter().map(|&t| spec.importance[t]).fold(f64::INFINITY, f64::min);
    if opts.exact_precheck && spec.eps.eps2 == 0.0 && min_importance > 0.0 && !top.is_empty() {
        // Zero error is attainable exactly when the reproduction LP is
        // feasible under the same thresholds.
        let sat = solve_sat(spec, opts)?;
        match sat.status {
            ReportStatus::Satisfiable => {
                if let Some(x) = sat
                    .weights
                    .as_ref()
                    .and_then(|w| layout.assignment_for(spec, &program, w, tau / 2.0))
                {
                    start = Some(x);
                }
            }
            ReportStatus::Unsatisfiable => {
                config.objective_lower_bound = Some(min_importance);
                notes.push("exact reproduction is infeasible, so the error is at least the smallest importance".into());
            }
            _ => {}
        }
    }

    if start.is_none() {
        // The hinge-loss fit is one LP and usually lands close to a good
        // incumbent, so even a tight time limit leaves weights to report.
        if let Ok(fit) = ordinal_regression_weights(spec) {
            start = layout.assignment_for(spec, &program, fit.weights.as_slice(), tau / 2.0);
        }
    }

    let heuristic = |x: &[f64]| layout.assignment_for(spec, &program, &layout.weights_of(x), tau / 2.0);
    let hooks = MilpHooks {
        start,
        heuristic: Some(&heuristic),
    };
    let sol = solve_milp(&program, &config, &hooks)?;
    let status = match sol.status {
        Status::Optimal => ReportStatus::Optimal,
        Status::TimeoutBest => ReportStatus::TimeoutBest,
        Status::Timeout => ReportStatus::Timeout,
        Status::Infeasible => ReportStatus::Infeasible,
        Status::Unbounded | Status::NumericalFailure => ReportStatus::Failed,
    };
    let mut report = ExplanationReport::new(spec, "opt", status);
    report.nodes = sol.nodes;
    report.iterations = sol.iterations;
    report.notes = notes;
    if let Some(msg) = &sol.message {
        report.notes.push(msg.clone());
    }
    if sol.best_bound.is_finite() {
        report.best_bound = Some(sol.best_bound);
    }
    if sol.has_assignment() {
        let w = layout.weights_of(&sol.values);
        report.attach_weights(spec, WeightVector::project(&w).as_slice().to_vec());
        report.objective = sol.objective;
        report.verified = verify(&report, spec);
    }
    Ok(report)
}

pub fn solve(spec: &ProblemSpec, mode: Mode, opts: &SolveOptions) -> Result<ExplanationReport> {
    match mode {
        Mode::Sat => solve_sat(spec, opts),
        Mode::Opt => solve_opt(spec, opts),
    }
}

/// Solves and verifies, multiplying `eps1` by the escalation factor after
/// every failed verification. Runs at most `max_escalations` solves (at
/// least one). Results without a certificate are returned as they are.
pub fn solve_with_escalation(spec: &ProblemSpec, mode: Mode, opts: &SolveOptions) -> Result<ExplanationReport> {
    spec.eps.validate()?;
    let attempts = spec.eps.max_escalations.max(1);
    let mut current = spec.clone();
    let mut last = None;
    for attempt in 0..attempts {
        let mut report = solve(&current, mode, opts)?;
        report.escalations = attempt;
        if report.verified || !report.has_weights() {
            return Ok(report);
        }
        report
            .notes
            .push(format!("verification failed at eps1 = {:e}", current.eps.eps1));
        last = Some(report);
        current.eps.eps1 *= current.eps.factor;
    }
    Ok(last.expect("at least one attempt"))
}
