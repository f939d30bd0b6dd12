//! Row management around the simplex: initial row set, lazy generation of
//! violated rows, and limits derived from the solver configuration.

use std::time::Instant;

use crate::simplex::{Limits, LpData, LpStatus, Tableau, Tol};
use crate::solution::{RowGeneration, SolverConfig};

/// Rows added per round of lazy generation.
const LAZY_BATCH: usize = 100;

pub(crate) struct Engine<'a> {
    pub data: &'a LpData,
    pub tol: Tol,
    lazy: bool,
    max_iter: usize,
    pub deadline: Option<Instant>,
    pub config: &'a SolverConfig,
}

impl<'a> Engine<'a> {
    pub fn new(data: &'a LpData, config: &'a SolverConfig, start: Instant) -> Self {
        let nrows = data.rows.len();
        let lazy = match config.row_generation {
            RowGeneration::Always => true,
            RowGeneration::Never => false,
            RowGeneration::Auto => nrows > 200 && nrows > 3 * data.n,
        };
        let max_iter = config
            .iteration_limit
            .unwrap_or_else(|| 100_000 + 50 * (nrows + data.n));
        Self {
            data,
            tol: Tol {
                feas: config.feasibility_tol,
                opt: config.optimality_tol,
                pivot: config.pivot_tol,
            },
            lazy,
            max_iter,
            deadline: config.time_limit.map(|t| start + t),
            config,
        }
    }

    pub fn interrupted(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
            || self
                .config
                .cancel
                .as_ref()
                .is_some_and(|c| c.load(std::sync::atomic::Ordering::Relaxed))
    }

    fn limits(&self) -> Limits<'_> {
        Limits {
            max_iter: self.max_iter,
            deadline: self.deadline,
            cancel: self.config.cancel.as_deref(),
        }
    }

    pub fn initial_rows(&self) -> Vec<usize> {
        if !self.lazy {
            return (0..self.data.rows.len()).collect();
        }
        (0..self.data.rows.len())
            .filter(|&r| self.data.row_lo[r] == self.data.row_hi[r])
            .collect()
    }

    pub fn fresh_tableau(&self) -> Tableau {
        Tableau::new(self.data, &self.initial_rows())
    }

    /// Optimizes `tab`, adding violated inactive rows until none remain.
    pub fn optimize(&self, tab: &mut Tableau) -> LpStatus {
        loop {
            let status = tab.solve(self.tol, self.limits());
            let complete = tab.nrows() == self.data.rows.len();
            match status {
                LpStatus::Optimal => {}
                LpStatus::Unbounded if !complete => {
                    let missing = self.inactive_rows(tab);
                    for r in missing {
                        tab.add_row(self.data, r);
                    }
                    continue;
                }
                other => return other,
            }
            if complete {
                return LpStatus::Optimal;
            }
            let x = tab.structural_values();
            let mut violated: Vec<(f64, usize)> = self
                .inactive_rows(tab)
                .into_iter()
                .filter_map(|r| {
                    let v = self.data.row_violation(r, x);
                    (v > self.tol.feas).then_some((v, r))
                })
                .collect();
            if violated.is_empty() {
                return LpStatus::Optimal;
            }
            violated.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
            violated.truncate(LAZY_BATCH);
            for (_, r) in violated {
                tab.add_row(self.data, r);
            }
        }
    }

    fn inactive_rows(&self, tab: &Tableau) -> Vec<usize> {
        let mut active = vec![false; self.data.rows.len()];
        for &r in tab.row_ids() {
            active[r] = true;
        }
        (0..self.data.rows.len()).filter(|&r| !active[r]).collect()
    }
}
