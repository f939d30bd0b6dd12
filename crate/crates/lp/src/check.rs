//! Solver-independent checks on assignments and dual vectors.

use crate::program::{Program, Sense, VarKind};

/// Largest violation of any variable bound or constraint row.
pub fn max_violation(program: &Program, values: &[f64]) -> f64 {
    if values.len() != program.num_vars() {
        return f64::INFINITY;
    }
    let bounds = program
        .vars()
        .iter()
        .zip(values)
        .map(|(v, &x)| (v.lower - x).max(x - v.upper).max(0.0));
    let rows = program.constraints().iter().map(|c| c.violation(values));
    bounds.chain(rows).fold(0.0, f64::max)
}

/// Largest distance of a binary variable from {0, 1}.
pub fn max_integrality_gap(program: &Program, values: &[f64]) -> f64 {
    program
        .vars()
        .iter()
        .zip(values)
        .filter(|(v, _)| v.kind == VarKind::Binary)
        .map(|(_, &x)| (x - x.round()).abs())
        .fold(0.0, f64::max)
}

pub fn is_feasible(program: &Program, values: &[f64], feas_tol: f64, int_tol: f64) -> bool {
    max_violation(program, values) <= feas_tol && max_integrality_gap(program, values) <= int_tol
}

/// Lagrangian lower bound of the LP relaxation for row multipliers `duals`:
///
/// `L(y) = min_{x in box} (c - Aᵀy)·x + Σ_i min_{s_i in row interval} y_i·s_i + const`.
///
/// Multipliers with the wrong sign for their row are projected to zero, so
/// the result is a valid bound for any input (possibly `-inf`).
pub fn lagrangian_bound(program: &Program, duals: &[f64]) -> f64 {
    let mut reduced = vec![0.0; program.num_vars()];
    for &(v, c) in program.objective().terms() {
        reduced[v.0] += c;
    }
    let mut bound = program.objective().constant_term();
    for (c, &y) in program.constraints().iter().zip(duals) {
        let y = match c.sense {
            Sense::Le => y.min(0.0),
            Sense::Ge => y.max(0.0),
            Sense::Eq => y,
        };
        if y == 0.0 {
            continue;
        }
        for &(v, a) in c.expr.terms() {
            reduced[v.0] -= y * a;
        }
        bound += y * c.rhs;
    }
    for (v, &d) in program.vars().iter().zip(&reduced) {
        if d > 0.0 {
            bound += d * v.lower;
        } else if d < 0.0 {
            bound += d * v.upper;
        }
    }
    if bound.is_nan() {
        f64::NEG_INFINITY
    } else {
        bound
    }
}
