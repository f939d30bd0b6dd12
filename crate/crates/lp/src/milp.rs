//! Branch and bound over binary variables.
//!
//! Nodes are explored best-bound first, preferring deeper nodes on ties so
//! the search dives toward incumbents.
//! Every incumbent is re-checked against the original program before it is
//! accepted.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::rc::Rc;
use std::time::Instant;

use crate::check;
use crate::engine::Engine;
use crate::error::{LpError, Result};
use crate::program::Program;
use crate::simplex::{LpData, LpStatus, Tableau};
use crate::solution::{BranchRule, Solution, SolverConfig, Status};

/// Callback that proposes a full assignment from a node's LP solution.
pub type Heuristic<'a> = dyn Fn(&[f64]) -> Option<Vec<f64>> + 'a;

#[derive(Default)]
pub struct MilpHooks<'a> {
    /// Assignment tried as the first incumbent.
    pub start: Option<Vec<f64>>,
    pub heuristic: Option<&'a Heuristic<'a>>,
}

/// Persistent list of branching decisions shared between nodes.
struct Fix {
    var: usize,
    value: f64,
    parent: Option<Rc<Fix>>,
}

struct Node {
    bound: f64,
    depth: usize,
    seq: usize,
    fixes: Option<Rc<Fix>>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap pops the maximum: lowest bound, then deepest, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

/// Nodes solved between rebuilds of the working tableau from its basis.
const REBUILD_EVERY: usize = 500;
/// Row residual above which the working tableau is rebuilt from scratch.
const DRIFT_LIMIT: f64 = 1e-7;

struct Search<'a> {
    program: &'a Program,
    config: &'a SolverConfig,
    binaries: Vec<usize>,
    incumbent: Option<(f64, Vec<f64>)>,
}

impl Search<'_> {
    fn round_bound(&self, obj: f64) -> f64 {
        let bound = match self.config.objective_step {
            Some(step) => (obj / step - 1e-6).ceil() * step,
            None => obj,
        };
        bound.max(self.config.objective_lower_bound.unwrap_or(f64::NEG_INFINITY))
    }

    fn prunes(&self, bound: f64) -> bool {
        match &self.incumbent {
            None => false,
            Some((inc, _)) => {
                let slack = match self.config.objective_step {
                    Some(step) => step * 1e-6,
                    None => 1e-9 * inc.abs().max(1.0),
                };
                bound >= inc - slack
            }
        }
    }

    /// Snaps binaries and accepts `cand` if it is feasible and improving.
    fn offer(&mut self, mut cand: Vec<f64>) -> bool {
        if cand.len() != self.program.num_vars() {
            return false;
        }
        for &j in &self.binaries {
            let r = cand[j].round();
            if (cand[j] - r).abs() > self.config.integrality_tol {
                return false;
            }
            cand[j] = r;
        }
        if check::max_violation(self.program, &cand) > self.config.feasibility_tol * (1.0 + 1e-6) {
            return false;
        }
        let obj = self.program.objective().eval(&cand);
        if self.incumbent.as_ref().is_some_and(|(inc, _)| obj >= *inc) {
            return false;
        }
        self.incumbent = Some((obj, cand));
        true
    }

    fn branch_var(&self, x: &[f64]) -> Option<usize> {
        let tol = self.config.integrality_tol;
        let mut best: Option<(usize, f64)> = None;
        for &j in &self.binaries {
            let frac = (x[j] - x[j].round()).abs();
            if frac <= tol {
                continue;
            }
            match self.config.branching {
                BranchRule::LowestIndex => return Some(j),
                BranchRule::MostFractional => {
                    if best.is_none_or(|(_, f)| frac > f + 1e-12) {
                        best = Some((j, frac));
                    }
                }
            }
        }
        best.map(|(j, _)| j)
    }
}

/// Solves a mixed 0/1 program to proven optimality or until a budget runs
/// out.
///
/// A single working tableau is reused across nodes: moving to a node resets
/// the binary bounds to that node's fixings and re-optimizes, which the dual
/// simplex does cheaply because bound changes keep the basis dual feasible.
pub fn solve_milp(program: &Program, config: &SolverConfig, hooks: &MilpHooks<'_>) -> Result<Solution> {
    config.validate()?;
    let start = Instant::now();
    let data = LpData::from_program(program);
    let engine = Engine::new(&data, config, start);
    let mut search = Search {
        program,
        config,
        binaries: program.binaries().map(|v| v.0).collect(),
        incumbent: None,
    };
    if let Some(cand) = &hooks.start {
        if cand.len() != program.num_vars() {
            return Err(LpError::InvalidConfig("start assignment has the wrong length".into()));
        }
        search.offer(cand.clone());
    }

    let mut heap = BinaryHeap::new();
    heap.push(Node {
        bound: search.round_bound(f64::NEG_INFINITY),
        depth: 0,
        seq: 0,
        fixes: None,
    });
    let mut tab = engine.fresh_tableau();
    let mut target_lo = data.lower.clone();
    let mut target_hi = data.upper.clone();
    let mut seq = 1usize;
    let mut nodes = 0usize;
    let mut iterations = 0usize;
    let mut stopped: Option<(Status, &'static str)> = None;
    let mut unbounded = false;
    // Bound of a node that was abandoned mid-solve.
    let mut lost_bound = f64::INFINITY;

    while let Some(node) = heap.pop() {
        if search.prunes(node.bound) {
            continue;
        }
        let out_of_nodes = config.node_limit.is_some_and(|l| nodes >= l);
        if out_of_nodes || engine.interrupted() {
            heap.push(node);
            stopped = Some((Status::TimeoutBest, "budget exhausted"));
            break;
        }
        nodes += 1;
        if nodes.is_multiple_of(REBUILD_EVERY) {
            tab = Tableau::from_snapshot(&data, &tab.snapshot(), engine.tol);
        }
        for &j in &search.binaries {
            target_lo[j] = data.lower[j];
            target_hi[j] = data.upper[j];
        }
        let mut link = node.fixes.as_deref();
        while let Some(f) = link {
            target_lo[f.var] = f.value;
            target_hi[f.var] = f.value;
            link = f.parent.as_deref();
        }
        for &j in &search.binaries {
            if tab.bounds(j) != (target_lo[j], target_hi[j]) {
                tab.set_bounds(j, target_lo[j], target_hi[j]);
            }
        }
        tab.iterations = 0;
        let mut status = engine.optimize(&mut tab);
        iterations += tab.iterations;
        if tab.residual(&data) > DRIFT_LIMIT {
            tab = engine.fresh_tableau();
            for &j in &search.binaries {
                tab.set_bounds(j, target_lo[j], target_hi[j]);
            }
            status = engine.optimize(&mut tab);
            iterations += tab.iterations;
        }
        match status {
            LpStatus::Optimal => {}
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                if node.depth == 0 {
                    unbounded = true;
                    break;
                }
                continue;
            }
            LpStatus::Interrupted => {
                lost_bound = lost_bound.min(node.bound);
                stopped = Some((Status::TimeoutBest, "budget exhausted"));
                break;
            }
            LpStatus::IterationLimit => {
                lost_bound = lost_bound.min(node.bound);
                stopped = Some((Status::NumericalFailure, "simplex iteration limit reached"));
                break;
            }
        }
        let bound = search.round_bound(tab.objective() + data.obj_constant).max(node.bound);
        if search.prunes(bound) {
            continue;
        }
        let x = tab.structural_values().to_vec();
        if let Some(h) = hooks.heuristic {
            if let Some(cand) = h(&x) {
                search.offer(cand);
                if search.prunes(bound) {
                    continue;
                }
            }
        }
        let Some(j) = search.branch_var(&x) else {
            if !search.offer(x.clone()) {
                // Round-off left the rounded point slightly infeasible:
                // fix every binary and re-solve the remaining LP.
                for &b in &search.binaries {
                    let v = x[b].round();
                    tab.set_bounds(b, v, v);
                }
                tab.iterations = 0;
                if engine.optimize(&mut tab) == LpStatus::Optimal {
                    search.offer(tab.structural_values().to_vec());
                }
                iterations += tab.iterations;
            }
            continue;
        };
        let up_first = x[j] >= 0.5;
        let (first, second) = if up_first { (1.0, 0.0) } else { (0.0, 1.0) };
        for value in [first, second] {
            heap.push(Node {
                bound,
                depth: node.depth + 1,
                seq,
                fixes: Some(Rc::new(Fix {
                    var: j,
                    value,
                    parent: node.fixes.clone(),
                })),
            });
            seq += 1;
        }
    }

    if unbounded {
        let mut sol = Solution::empty(Status::Unbounded);
        sol.nodes = nodes;
        sol.iterations = iterations;
        return Ok(sol);
    }
    let open_bound = heap.iter().map(|n| n.bound).fold(lost_bound, f64::min);
    let mut sol = Solution::empty(Status::Optimal);
    sol.nodes = nodes;
    sol.iterations = iterations;
    match (stopped, search.incumbent) {
        (None, Some((obj, values))) => {
            sol.objective = Some(obj);
            sol.best_bound = obj;
            sol.values = values;
        }
        (None, None) => {
            sol.status = Status::Infeasible;
            sol.best_bound = f64::INFINITY;
        }
        (Some((status, msg)), incumbent) => {
            sol.message = Some(msg.to_string());
            sol.status = match (status, &incumbent) {
                (Status::TimeoutBest, None) => Status::Timeout,
                (s, _) => s,
            };
            match incumbent {
                Some((obj, values)) => {
                    sol.best_bound = open_bound.min(obj);
                    sol.objective = Some(obj);
                    sol.values = values;
                }
                None => sol.best_bound = open_bound,
            }
        }
    }
    Ok(sol)
}
