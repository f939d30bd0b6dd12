use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::Duration;

use crate::error::{LpError, Result};
use crate::expr::VarId;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    /// Budget exhausted; the best incumbent found so far is attached.
    TimeoutBest,
    /// Budget exhausted before any feasible assignment was found.
    Timeout,
    /// The simplex iteration cap was hit or round-off could not be repaired.
    /// Never reported as `Optimal`.
    NumericalFailure,
}

impl Status {
    pub fn has_assignment(self) -> bool {
        matches!(self, Status::Optimal | Status::TimeoutBest)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchRule {
    /// Binary closest to 0.5; ties go to the lowest variable id.
    #[default]
    MostFractional,
    /// First fractional binary by variable id.
    LowestIndex,
}

/// When to generate constraint rows lazily instead of loading them all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RowGeneration {
    /// Lazy once the row count clearly dominates the column count.
    #[default]
    Auto,
    Always,
    Never,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Absolute tolerance on row and bound violations.
    pub feasibility_tol: f64,
    /// Reduced-cost tolerance.
    pub optimality_tol: f64,
    /// Distance from 0/1 under which a binary counts as integral.
    pub integrality_tol: f64,
    pub pivot_tol: f64,
    pub time_limit: Option<Duration>,
    pub node_limit: Option<usize>,
    /// Per-LP simplex iteration cap; `None` picks one from the model size.
    pub iteration_limit: Option<usize>,
    pub branching: BranchRule,
    /// Known spacing of attainable objective values (e.g. 1 when every
    /// feasible objective is an integer). Lets node bounds be rounded up.
    pub objective_step: Option<f64>,
    /// Externally proven lower bound on the optimum. Search stops as soon as
    /// an incumbent reaches it. A wrong value yields a wrong optimum.
    pub objective_lower_bound: Option<f64>,
    pub row_generation: RowGeneration,
    pub cancel: Option<Arc<AtomicBool>>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            feasibility_tol: 1e-9,
            optimality_tol: 1e-9,
            integrality_tol: 1e-6,
            pivot_tol: 1e-10,
            time_limit: None,
            node_limit: None,
            iteration_limit: None,
            branching: BranchRule::MostFractional,
            objective_step: None,
            objective_lower_bound: None,
            row_generation: RowGeneration::Auto,
            cancel: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !positive(self.feasibility_tol) || !positive(self.optimality_tol) || !positive(self.pivot_tol) {
            return Err(LpError::InvalidConfig("tolerances must be positive".into()));
        }
        if !positive(self.integrality_tol) || self.integrality_tol >= 0.5 {
            return Err(LpError::InvalidConfig("integrality tolerance must lie in (0, 0.5)".into()));
        }
        if let Some(step) = self.objective_step {
            if !positive(step) {
                return Err(LpError::InvalidConfig("objective step must be positive".into()));
            }
        }
        Ok(())
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn with_feasibility_tol(mut self, tol: f64) -> Self {
        self.feasibility_tol = tol;
        self
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub status: Status,
    /// Objective of the attached assignment (includes the objective constant).
    pub objective: Option<f64>,
    /// Dense assignment indexed by `VarId`; empty when there is none.
    pub values: Vec<f64>,
    /// Proven lower bound on the optimum.
    pub best_bound: f64,
    pub nodes: usize,
    pub iterations: usize,
    /// Row duals for pure LPs solved to optimality.
    pub duals: Option<Vec<f64>>,
    pub message: Option<String>,
}

impl Solution {
    pub(crate) fn empty(status: Status) -> Self {
        Self {
            status,
            objective: None,
            values: Vec::new(),
            best_bound: f64::NEG_INFINITY,
            nodes: 0,
            iterations: 0,
            duals: None,
            message: None,
        }
    }

    pub fn value(&self, var: VarId) -> f64 {
        self.values[var.0]
    }

    pub fn has_assignment(&self) -> bool {
        !self.values.is_empty()
    }

    /// Absolute gap between incumbent and proven bound.
    pub fn gap(&self) -> Option<f64> {
        self.objective.map(|o| (o - self.best_bound).max(0.0))
    }
}
