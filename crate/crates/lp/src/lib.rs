//! Linear and mixed 0/1 programming.
//!
//! Models are built with [`Program`] and solved by [`solve_lp`] or
//! [`solve_milp`]. The engine is a dense bounded-variable simplex with lazy
//! row generation, driven by a best-first branch and bound for binaries.
//! [`check`] holds solver-independent verification helpers.

pub mod check;
mod engine;
mod error;
mod expr;
mod lp;
mod lpformat;
mod milp;
mod program;
mod simplex;
mod solution;

pub use error::{LpError, Result};
pub use expr::{LinearExpr, VarId};
pub use lp::solve_lp;
pub use lpformat::to_lp_format;
pub use milp::{solve_milp, Heuristic, MilpHooks};
pub use program::{BigM, Constraint, Program, Sense, VarKind, Variable};
pub use solution::{BranchRule, RowGeneration, Solution, SolverConfig, Status};
