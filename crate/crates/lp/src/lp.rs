//! Pure linear programs.

use std::time::Instant;

use crate::engine::Engine;
use crate::error::{LpError, Result};
use crate::program::Program;
use crate::simplex::{LpData, LpStatus};
use crate::solution::{Solution, SolverConfig, Status};

/// Solves a program without binary variables. On optimality the solution
/// carries one dual multiplier per constraint (zero for rows that never
/// entered the working set).
pub fn solve_lp(program: &Program, config: &SolverConfig) -> Result<Solution> {
    if program.num_binaries() > 0 {
        return Err(LpError::HasBinaries);
    }
    config.validate()?;
    let start = Instant::now();
    let data = LpData::from_program(program);
    let engine = Engine::new(&data, config, start);
    let mut tab = engine.fresh_tableau();
    let status = engine.optimize(&mut tab);
    let mut sol = Solution::empty(match status {
        LpStatus::Optimal => Status::Optimal,
        LpStatus::Infeasible => Status::Infeasible,
        LpStatus::Unbounded => Status::Unbounded,
        LpStatus::Interrupted => Status::Timeout,
        LpStatus::IterationLimit => Status::NumericalFailure,
    });
    sol.nodes = 1;
    sol.iterations = tab.iterations;
    match status {
        LpStatus::Optimal => {
            let values = tab.structural_values().to_vec();
            let objective = program.objective().eval(&values);
            let mut duals = vec![0.0; data.rows.len()];
            for (r, y) in tab.row_duals() {
                duals[r] = y;
            }
            sol.objective = Some(objective);
            sol.best_bound = objective;
            sol.values = values;
            sol.duals = Some(duals);
        }
        LpStatus::Infeasible => sol.best_bound = f64::INFINITY,
        LpStatus::Unbounded => {}
        LpStatus::Interrupted => sol.message = Some("time limit or cancellation".into()),
        LpStatus::IterationLimit => sol.message = Some("simplex iteration limit reached".into()),
    }
    Ok(sol)
}
