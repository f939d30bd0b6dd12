//! Dense bounded-variable simplex on an explicit tableau.
//!
//! Every constraint row `a·x ∈ [lo, hi]` gets a slack `s = a·x` whose bounds
//! carry the row interval, so the initial basis is all slacks. Structural
//! bounds are handled implicitly (nonbasic variables sit at a bound).
//! Rows can be appended to a live tableau, which is how lazily generated
//! constraints and branch-and-bound warm starts are served.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use crate::program::Program;

const NONE: usize = usize::MAX;
/// Tableau entries smaller than this are treated as exact zeros.
const DROP_TOL: f64 = 1e-13;
/// Ratio tests ignore entries below this fraction of the largest candidate.
const RELATIVE_PIVOT: f64 = 1e-7;
/// Consecutive degenerate pivots tolerated before switching to Bland's rule.
const DEGENERATE_LIMIT: usize = 40;
/// Basic values are recomputed from the tableau this often.
const REFRESH_EVERY: usize = 25;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Tol {
    pub feas: f64,
    pub opt: f64,
    pub pivot: f64,
}

#[derive(Clone, Copy)]
pub(crate) struct Limits<'a> {
    pub max_iter: usize,
    pub deadline: Option<Instant>,
    pub cancel: Option<&'a AtomicBool>,
}

impl Limits<'_> {
    fn interrupted(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
            || self.cancel.is_some_and(|c| c.load(Ordering::Relaxed))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    Interrupted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum State {
    Basic,
    Lower,
    Upper,
    /// Free nonbasic variable parked at zero.
    Zero,
}

/// Column data of a program, shared by every tableau built from it.
#[derive(Debug, Clone)]
pub(crate) struct LpData {
    pub n: usize,
    pub cost: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub rows: Vec<Vec<(usize, f64)>>,
    pub row_lo: Vec<f64>,
    pub row_hi: Vec<f64>,
    pub obj_constant: f64,
}

impl LpData {
    pub fn from_program(p: &Program) -> Self {
        let n = p.num_vars();
        let mut cost = vec![0.0; n];
        for &(v, c) in p.objective().terms() {
            cost[v.0] += c;
        }
        let mut rows = Vec::with_capacity(p.constraints().len());
        let mut row_lo = Vec::with_capacity(p.constraints().len());
        let mut row_hi = Vec::with_capacity(p.constraints().len());
        for c in p.constraints() {
            rows.push(c.expr.terms().iter().map(|&(v, a)| (v.0, a)).collect());
            let (lo, hi) = c.activity_bounds();
            row_lo.push(lo);
            row_hi.push(hi);
        }
        Self {
            n,
            cost,
            lower: p.vars().iter().map(|v| v.lower).collect(),
            upper: p.vars().iter().map(|v| v.upper).collect(),
            rows,
            row_lo,
            row_hi,
            obj_constant: p.objective().constant_term(),
        }
    }

    pub fn activity(&self, row: usize, x: &[f64]) -> f64 {
        self.rows[row].iter().map(|&(j, a)| a * x[j]).sum()
    }

    pub fn row_violation(&self, row: usize, x: &[f64]) -> f64 {
        let act = self.activity(row, x);
        (self.row_lo[row] - act).max(act - self.row_hi[row]).max(0.0)
    }
}

/// Column identity that survives row insertions, used for basis snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Column {
    Struct(usize),
    Slack(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct BasisSnapshot {
    pub rows: Vec<usize>,
    pub basic: Vec<Column>,
    pub at_upper: Vec<Column>,
}

#[derive(Debug, Clone)]
pub(crate) struct Tableau {
    n_struct: usize,
    row_ids: Vec<usize>,
    t: Vec<Vec<f64>>,
    beta: Vec<f64>,
    d: Vec<f64>,
    cost: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    x: Vec<f64>,
    state: Vec<State>,
    basis: Vec<usize>,
    row_of: Vec<usize>,
    pub iterations: usize,
}

fn initial_state(lo: f64, hi: f64, cost: f64) -> (State, f64) {
    match (lo.is_finite(), hi.is_finite()) {
        (true, true) if lo == hi => (State::Lower, lo),
        (true, true) if cost < 0.0 => (State::Upper, hi),
        (true, _) => (State::Lower, lo),
        (false, true) => (State::Upper, hi),
        (false, false) => (State::Zero, 0.0),
    }
}

impl Tableau {
    pub fn new(data: &LpData, rows: &[usize]) -> Self {
        let n = data.n;
        let mut state = Vec::with_capacity(n);
        let mut x = Vec::with_capacity(n);
        for j in 0..n {
            let (s, v) = initial_state(data.lower[j], data.upper[j], data.cost[j]);
            state.push(s);
            x.push(v);
        }
        let mut tab = Self {
            n_struct: n,
            row_ids: Vec::new(),
            t: Vec::new(),
            beta: Vec::new(),
            d: data.cost.clone(),
            cost: data.cost.clone(),
            lo: data.lower.clone(),
            hi: data.upper.clone(),
            x,
            state,
            basis: Vec::new(),
            row_of: vec![NONE; n],
            iterations: 0,
        };
        for &r in rows {
            tab.add_row(data, r);
        }
        tab
    }

    /// Rebuilds a tableau for `snap` by eliminating its basic structurals
    /// from a fresh slack basis. Columns that cannot be pivoted in (singular
    /// basis) are left nonbasic; the caller re-optimizes anyway.
    pub fn from_snapshot(data: &LpData, snap: &BasisSnapshot, tol: Tol) -> Self {
        let mut tab = Self::new(data, &snap.rows);
        let ncols = tab.ncols();
        let slack_index: std::collections::HashMap<usize, usize> = tab
            .row_ids
            .iter()
            .enumerate()
            .map(|(i, &r)| (r, tab.n_struct + i))
            .collect();
        let resolve = |c: Column| match c {
            Column::Struct(j) => Some(j),
            Column::Slack(r) => slack_index.get(&r).copied(),
        };
        let mut want_basic = vec![false; ncols];
        for k in snap.basic.iter().filter_map(|&c| resolve(c)) {
            want_basic[k] = true;
        }
        let mut at_upper = vec![false; ncols];
        for k in snap.at_upper.iter().filter_map(|&c| resolve(c)) {
            at_upper[k] = true;
        }
        for j in 0..tab.n_struct {
            if !want_basic[j] {
                continue;
            }
            let mut best = NONE;
            let mut best_abs = tol.pivot;
            for i in 0..tab.t.len() {
                let b = tab.basis[i];
                if b >= tab.n_struct && !want_basic[b] {
                    let a = tab.t[i][j].abs();
                    if a > best_abs {
                        best_abs = a;
                        best = i;
                    }
                }
            }
            if best != NONE {
                tab.pivot(best, j);
            }
        }
        for k in 0..ncols {
            if tab.state[k] == State::Basic {
                continue;
            }
            let (s, v) = if at_upper[k] && tab.hi[k].is_finite() && tab.lo[k] != tab.hi[k] {
                (State::Upper, tab.hi[k])
            } else {
                initial_state(tab.lo[k], tab.hi[k], tab.cost[k])
            };
            tab.state[k] = s;
            tab.x[k] = v;
        }
        tab.refresh();
        tab
    }

    pub fn snapshot(&self) -> BasisSnapshot {
        let col = |k: usize| {
            if k < self.n_struct {
                Column::Struct(k)
            } else {
                Column::Slack(self.row_ids[k - self.n_struct])
            }
        };
        BasisSnapshot {
            rows: self.row_ids.clone(),
            basic: self.basis.iter().map(|&k| col(k)).collect(),
            at_upper: (0..self.ncols())
                .filter(|&k| self.state[k] == State::Upper)
                .map(col)
                .collect(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.cost.len()
    }

    pub fn nrows(&self) -> usize {
        self.t.len()
    }

    pub fn row_ids(&self) -> &[usize] {
        &self.row_ids
    }

    pub fn structural_values(&self) -> &[f64] {
        &self.x[..self.n_struct]
    }

    pub fn objective(&self) -> f64 {
        self.cost.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    /// Largest relative mismatch between a slack value and the activity of
    /// its row. Grows when accumulated round-off corrupts the tableau.
    pub fn residual(&self, data: &LpData) -> f64 {
        let xs = &self.x[..self.n_struct];
        self.row_ids
            .iter()
            .enumerate()
            .map(|(i, &r)| {
                let act = data.activity(r, xs);
                (self.x[self.n_struct + i] - act).abs() / (1.0 + act.abs())
            })
            .fold(0.0, f64::max)
    }

    /// Row duals `y` (one per active row) at an optimal basis.
    pub fn row_duals(&self) -> Vec<(usize, f64)> {
        self.row_ids
            .iter()
            .enumerate()
            .map(|(i, &r)| (r, self.d[self.n_struct + i]))
            .collect()
    }

    /// Appends constraint row `r` of `data`, expressed in the current basis,
    /// with its slack as the new basic variable.
    pub fn add_row(&mut self, data: &LpData, r: usize) {
        let ncols = self.ncols();
        let mut row = vec![0.0; ncols + 1];
        for &(j, a) in &data.rows[r] {
            row[j] = -a;
        }
        let mut beta = 0.0;
        for i in 0..self.t.len() {
            let b = self.basis[i];
            if b < self.n_struct {
                let f = row[b];
                if f != 0.0 {
                    for (v, &tv) in row[..ncols].iter_mut().zip(&self.t[i]) {
                        *v -= f * tv;
                    }
                    row[b] = 0.0;
                    beta -= f * self.beta[i];
                }
            }
        }
        row[ncols] = 1.0;
        for existing in &mut self.t {
            existing.push(0.0);
        }
        self.t.push(row);
        self.beta.push(beta);
        self.cost.push(0.0);
        self.d.push(0.0);
        self.lo.push(data.row_lo[r]);
        self.hi.push(data.row_hi[r]);
        self.x.push(data.activity(r, &self.x[..self.n_struct]));
        self.state.push(State::Basic);
        self.basis.push(ncols);
        self.row_of.push(self.t.len() - 1);
        self.row_ids.push(r);
    }

    /// Changes the bounds of a structural column. A nonbasic column moves to
    /// the bound its reduced cost prefers, which keeps an optimal basis dual
    /// feasible; a basic one may become primal infeasible.
    pub fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) {
        self.lo[j] = lo;
        self.hi[j] = hi;
        if self.state[j] != State::Basic {
            let (s, v) = if lo == hi {
                (State::Lower, lo)
            } else {
                initial_state(lo, hi, self.d[j])
            };
            self.state[j] = s;
            self.x[j] = v;
        }
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lo[j], self.hi[j])
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let mut prow = std::mem::take(&mut self.t[r]);
        let inv = 1.0 / prow[q];
        for v in prow.iter_mut() {
            *v *= inv;
        }
        prow[q] = 1.0;
        self.beta[r] *= inv;
        let beta_r = self.beta[r];
        let nz: Vec<usize> = (0..prow.len()).filter(|&k| prow[k] != 0.0).collect();
        let sparse = nz.len() * 2 < prow.len();
        let update = |row: &mut Vec<f64>, f: f64| {
            if sparse {
                for &k in &nz {
                    row[k] -= f * prow[k];
                    if row[k].abs() < DROP_TOL {
                        row[k] = 0.0;
                    }
                }
            } else {
                for (v, &p) in row.iter_mut().zip(&prow) {
                    *v -= f * p;
                    if v.abs() < DROP_TOL {
                        *v = 0.0;
                    }
                }
            }
        };
        for i in 0..self.t.len() {
            if i == r {
                continue;
            }
            let f = self.t[i][q];
            if f != 0.0 {
                update(&mut self.t[i], f);
                self.t[i][q] = 0.0;
                self.beta[i] -= f * beta_r;
            }
        }
        let dq = self.d[q];
        if dq != 0.0 {
            update(&mut self.d, dq);
            self.d[q] = 0.0;
        }
        self.t[r] = prow;
        let leaving = self.basis[r];
        self.basis[r] = q;
        self.row_of[q] = r;
        self.row_of[leaving] = NONE;
        self.state[leaving] = State::Lower;
        self.state[q] = State::Basic;
        self.iterations += 1;
    }

    fn recompute_x(&mut self) {
        let nz: Vec<(usize, f64)> = (0..self.ncols())
            .filter(|&j| self.state[j] != State::Basic && self.x[j] != 0.0)
            .map(|j| (j, self.x[j]))
            .collect();
        for i in 0..self.t.len() {
            let row = &self.t[i];
            let v = self.beta[i] - nz.iter().map(|&(j, xj)| row[j] * xj).sum::<f64>();
            self.x[self.basis[i]] = v;
        }
    }

    fn recompute_d(&mut self) {
        self.d.copy_from_slice(&self.cost);
        for i in 0..self.t.len() {
            let cb = self.cost[self.basis[i]];
            if cb != 0.0 {
                for (dv, &tv) in self.d.iter_mut().zip(&self.t[i]) {
                    *dv -= cb * tv;
                }
            }
        }
        for &b in &self.basis {
            self.d[b] = 0.0;
        }
    }

    pub fn refresh(&mut self) {
        self.recompute_x();
        self.recompute_d();
    }

    fn infeasibility(&self, k: usize) -> f64 {
        (self.lo[k] - self.x[k]).max(self.x[k] - self.hi[k]).max(0.0)
    }

    fn primal_feasible(&self, tol: f64) -> bool {
        self.basis.iter().all(|&b| self.infeasibility(b) <= tol)
    }

    fn is_fixed(&self, j: usize) -> bool {
        self.lo[j] == self.hi[j]
    }

    fn dual_feasible(&self, tol: f64) -> bool {
        (0..self.ncols()).all(|j| {
            if self.is_fixed(j) {
                return true;
            }
            match self.state[j] {
                State::Basic => true,
                State::Lower => self.d[j] >= -tol,
                State::Upper => self.d[j] <= tol,
                State::Zero => self.d[j].abs() <= tol,
            }
        })
    }

    /// Re-optimizes from the current basis with whichever method applies.
    pub fn solve(&mut self, tol: Tol, limits: Limits<'_>) -> LpStatus {
        self.refresh();
        if !self.primal_feasible(tol.feas) {
            let all_zero_cost = self.cost.iter().all(|&c| c == 0.0);
            if !all_zero_cost && self.dual_feasible(tol.opt) {
                match self.dual(tol, limits) {
                    LpStatus::Optimal => {}
                    other => return other,
                }
            } else {
                match self.phase_one(tol, limits) {
                    LpStatus::Optimal => {}
                    other => return other,
                }
                self.recompute_d();
            }
        }
        self.primal(tol, limits)
    }

    fn check_limits(&self, limits: &Limits<'_>, start_iter: usize) -> Option<LpStatus> {
        if self.iterations - start_iter >= limits.max_iter {
            return Some(LpStatus::IterationLimit);
        }
        if self.iterations.is_multiple_of(16) && limits.interrupted() {
            return Some(LpStatus::Interrupted);
        }
        None
    }

    /// Moves entering column `q` by `step` in direction `dir`, then either
    /// flips it to its opposite bound or pivots it into row `leave`.
    fn take_step(&mut self, q: usize, dir: f64, step: f64, leave: Option<(usize, State)>) {
        if step != 0.0 {
            let delta = dir * step;
            self.x[q] += delta;
            for i in 0..self.t.len() {
                let a = self.t[i][q];
                if a != 0.0 {
                    self.x[self.basis[i]] -= a * delta;
                }
            }
        }
        match leave {
            None => {
                let (s, v) = if dir > 0.0 {
                    (State::Upper, self.hi[q])
                } else {
                    (State::Lower, self.lo[q])
                };
                self.state[q] = s;
                self.x[q] = v;
            }
            Some((r, bound)) => {
                let leaving = self.basis[r];
                self.pivot(r, q);
                let (s, v) = match bound {
                    State::Upper if self.is_fixed(leaving) => (State::Lower, self.lo[leaving]),
                    State::Upper => (State::Upper, self.hi[leaving]),
                    _ => (State::Lower, self.lo[leaving]),
                };
                self.state[leaving] = s;
                self.x[leaving] = v;
            }
        }
        if self.iterations.is_multiple_of(REFRESH_EVERY) {
            self.recompute_x();
        }
    }

    /// Harris two-pass ratio test for a primal step of column `q`.
    /// `phase_one` lets infeasible basics reach their violated bound.
    fn primal_ratio(&self, q: usize, dir: f64, tol: Tol, bland: bool, phase_one: bool) -> (f64, Option<(usize, State)>) {
        let own = if self.lo[q].is_finite() && self.hi[q].is_finite() {
            self.hi[q] - self.lo[q]
        } else {
            f64::INFINITY
        };
        // (row, rate, distance to bound, bound hit)
        let mut cands: Vec<(usize, f64, f64, State)> = Vec::new();
        let mut theta_max = f64::INFINITY;
        let col_max = self.t.iter().map(|row| row[q].abs()).fold(0.0, f64::max);
        let min_pivot = tol.pivot.max(RELATIVE_PIVOT * col_max);
        for i in 0..self.t.len() {
            let a = self.t[i][q];
            if a.abs() <= min_pivot {
                continue;
            }
            let b = self.basis[i];
            let g = -a * dir;
            let xb = self.x[b];
            let below = xb < self.lo[b] - tol.feas;
            let above = xb > self.hi[b] + tol.feas;
            let (dist, bound) = if g > 0.0 {
                if phase_one && below {
                    (self.lo[b] - xb, State::Lower)
                } else if above || !self.hi[b].is_finite() {
                    continue;
                } else {
                    (self.hi[b] - xb, State::Upper)
                }
            } else if phase_one && above {
                (xb - self.hi[b], State::Upper)
            } else if below || !self.lo[b].is_finite() {
                continue;
            } else {
                (xb - self.lo[b], State::Lower)
            };
            let gabs = g.abs();
            theta_max = theta_max.min((dist.max(0.0) + tol.feas) / gabs);
            cands.push((i, gabs, dist.max(0.0), bound));
        }
        if cands.is_empty() {
            return (own, None);
        }
        let mut best: Option<(usize, f64, f64, State)> = None;
        for &(i, gabs, dist, bound) in &cands {
            if dist / gabs > theta_max {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bg, _, _)) => {
                    if bland {
                        self.basis[i] < self.basis[bi]
                    } else {
                        gabs > bg
                    }
                }
            };
            if better {
                best = Some((i, gabs, dist, bound));
            }
        }
        let (i, gabs, dist, bound) = best.expect("nonempty candidate set");
        let step = dist / gabs;
        if own.is_finite() && own <= step {
            return (own, None);
        }
        (step, Some((i, bound)))
    }

    fn choose_entering(&self, reduced: &[f64], tol: f64, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for (j, &dj) in reduced.iter().enumerate() {
            if self.is_fixed(j) {
                continue;
            }
            let dir = match self.state[j] {
                State::Basic => continue,
                State::Lower if dj < -tol => 1.0,
                State::Upper if dj > tol => -1.0,
                State::Zero if dj.abs() > tol => -dj.signum(),
                _ => continue,
            };
            if bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(_, _, m)| dj.abs() > m) {
                best = Some((j, dir, dj.abs()));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// Primal simplex from a primal feasible basis.
    fn primal(&mut self, tol: Tol, limits: Limits<'_>) -> LpStatus {
        let start = self.iterations;
        let mut degenerate = 0usize;
        let mut since_refresh = 0usize;
        loop {
            if let Some(s) = self.check_limits(&limits, start) {
                return s;
            }
            since_refresh += 1;
            if since_refresh >= 200 {
                self.recompute_d();
                since_refresh = 0;
            }
            let bland = degenerate > DEGENERATE_LIMIT;
            let reduced = self.d.clone();
            let Some((q, dir)) = self.choose_entering(&reduced, tol.opt, bland) else {
                self.recompute_x();
                return LpStatus::Optimal;
            };
            let (step, leave) = self.primal_ratio(q, dir, tol, bland, false);
            if step.is_infinite() {
                return LpStatus::Unbounded;
            }
            if step <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.take_step(q, dir, step, leave);
        }
    }

    /// Composite primal phase one: minimizes the sum of bound violations of
    /// basic variables.
    fn phase_one(&mut self, tol: Tol, limits: Limits<'_>) -> LpStatus {
        let start = self.iterations;
        let mut degenerate = 0usize;
        let ncols = self.ncols();
        loop {
            if let Some(s) = self.check_limits(&limits, start) {
                return s;
            }
            if self.iterations.is_multiple_of(REFRESH_EVERY) {
                self.recompute_x();
            }
            let mut d1 = vec![0.0; ncols];
            let mut any = false;
            for i in 0..self.t.len() {
                let b = self.basis[i];
                let c = if self.x[b] < self.lo[b] - tol.feas {
                    -1.0
                } else if self.x[b] > self.hi[b] + tol.feas {
                    1.0
                } else {
                    continue;
                };
                any = true;
                for (dv, &tv) in d1.iter_mut().zip(&self.t[i]) {
                    *dv -= c * tv;
                }
            }
            if !any {
                self.recompute_x();
                if self.primal_feasible(tol.feas) {
                    return LpStatus::Optimal;
                }
                continue;
            }
            for &b in &self.basis {
                d1[b] = 0.0;
            }
            let bland = degenerate > DEGENERATE_LIMIT;
            let Some((q, dir)) = self.choose_entering(&d1, tol.opt, bland) else {
                self.recompute_x();
                if self.primal_feasible(tol.feas) {
                    return LpStatus::Optimal;
                }
                return LpStatus::Infeasible;
            };
            let (step, leave) = self.primal_ratio(q, dir, tol, bland, true);
            if step.is_infinite() {
                // Only reachable through round-off in the phase-one costs.
                return LpStatus::Infeasible;
            }
            if step <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.take_step(q, dir, step, leave);
        }
    }

    /// Dual simplex from a dual feasible basis.
    fn dual(&mut self, tol: Tol, limits: Limits<'_>) -> LpStatus {
        let start = self.iterations;
        let mut degenerate = 0usize;
        loop {
            if let Some(s) = self.check_limits(&limits, start) {
                return s;
            }
            let bland = degenerate > DEGENERATE_LIMIT;
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.t.len() {
                let b = self.basis[i];
                let inf = self.infeasibility(b);
                if inf <= tol.feas {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some((li, linf)) => {
                        if bland {
                            b < self.basis[li]
                        } else {
                            inf > linf
                        }
                    }
                };
                if better {
                    leave = Some((i, inf));
                }
            }
            let Some((r, _)) = leave else {
                self.recompute_x();
                if self.primal_feasible(tol.feas) {
                    return LpStatus::Optimal;
                }
                continue;
            };
            let b = self.basis[r];
            let (target, up) = if self.x[b] < self.lo[b] {
                (self.lo[b], 1.0)
            } else {
                (self.hi[b], -1.0)
            };
            // Harris pass one.
            let row = &self.t[r];
            let mut theta = f64::INFINITY;
            let mut cands: Vec<(usize, f64, f64)> = Vec::new();
            let row_max = (0..row.len())
                .filter(|&j| self.state[j] != State::Basic && !self.is_fixed(j))
                .map(|j| row[j].abs())
                .fold(0.0, f64::max);
            let min_pivot = tol.pivot.max(RELATIVE_PIVOT * row_max);
            for j in 0..row.len() {
                let a = row[j];
                if a.abs() <= min_pivot || self.is_fixed(j) {
                    continue;
                }
                let eligible = match self.state[j] {
                    State::Basic => false,
                    State::Lower => -up * a > 0.0,
                    State::Upper => up * a > 0.0,
                    State::Zero => true,
                };
                if !eligible {
                    continue;
                }
                let dj = self.d[j].abs();
                theta = theta.min((dj + tol.opt) / a.abs());
                cands.push((j, a.abs(), dj));
            }
            if cands.is_empty() {
                return LpStatus::Infeasible;
            }
            let mut best: Option<(usize, f64, f64)> = None;
            for &(j, aabs, dj) in &cands {
                if dj / aabs > theta {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bj, ba, _)) => {
                        if bland {
                            j < bj
                        } else {
                            aabs > ba
                        }
                    }
                };
                if better {
                    best = Some((j, aabs, dj));
                }
            }
            let (q, aabs, dj) = best.expect("nonempty candidate set");
            if dj / aabs <= 1e-12 {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            let a = self.t[r][q];
            let dxq = -(target - self.x[b]) / a;
            self.x[q] += dxq;
            for i in 0..self.t.len() {
                if i != r {
                    let ai = self.t[i][q];
                    if ai != 0.0 {
                        self.x[self.basis[i]] -= ai * dxq;
                    }
                }
            }
            self.pivot(r, q);
            self.x[b] = target;
            self.state[b] = if up > 0.0 || self.is_fixed(b) {
                State::Lower
            } else {
                State::Upper
            };
            if self.iterations.is_multiple_of(REFRESH_EVERY) {
                self.recompute_x();
            }
        }
    }
}
