//! Explains a given ranking of tuples by linear scoring functions: decides
//! whether some nonnegative weight vector reproduces the top-k exactly and
//! finds the weight vector that minimizes total position error.

pub mod approx;
pub mod baselines;
mod error;
pub mod evalverify;
pub mod formulate;
pub mod model;
mod problem;

pub use error::{CoreError, Result};
pub use problem::{ObjectiveKind, ProblemSpec};
