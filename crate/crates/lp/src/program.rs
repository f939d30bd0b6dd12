//! Model container: variables, constraints and a minimization objective.

use std::fmt;

use crate::error::{LpError, Result};
use crate::expr::{LinearExpr, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
}

/// Constraint sense. Only non-strict relations exist; strict ones must be
/// rewritten with an explicit gap before they reach the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        })
    }
}

/// `expr sense rhs`, where `expr` carries no constant term.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub expr: LinearExpr,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    /// Interval that the expression's activity must fall into.
    pub fn activity_bounds(&self) -> (f64, f64) {
        match self.sense {
            Sense::Le => (f64::NEG_INFINITY, self.rhs),
            Sense::Ge => (self.rhs, f64::INFINITY),
            Sense::Eq => (self.rhs, self.rhs),
        }
    }

    /// Amount by which `values` violates this constraint (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let act = self.expr.eval(values);
        let (lo, hi) = self.activity_bounds();
        (lo - act).max(act - hi).max(0.0)
    }
}

/// Big-M constants for an indicator pair. `on` relaxes the row that is active
/// when the indicator is 1, `off` relaxes the row active when it is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BigM {
    pub on: f64,
    pub off: f64,
}

impl BigM {
    pub fn symmetric(m: f64) -> Self {
        Self { on: m, off: m }
    }
}

/// A mixed binary linear program, always in minimization form.
#[derive(Debug, Clone, Default)]
pub struct Program {
    vars: Vec<Variable>,
    constraints: Vec<Constraint>,
    objective: LinearExpr,
}

impl Program {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lower: f64, upper: f64) -> Result<VarId> {
        let name = name.into();
        if lower.is_nan() || upper.is_nan() || lower > upper || lower == f64::INFINITY || upper == f64::NEG_INFINITY {
            return Err(LpError::InvalidBounds { name, lower, upper });
        }
        self.vars.push(Variable {
            name,
            kind: VarKind::Continuous,
            lower,
            upper,
        });
        Ok(VarId(self.vars.len() - 1))
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> VarId {
        self.vars.push(Variable {
            name: name.into(),
            kind: VarKind::Binary,
            lower: 0.0,
            upper: 1.0,
        });
        VarId(self.vars.len() - 1)
    }

    /// Tightens or relaxes the bounds of a declared variable.
    pub fn set_bounds(&mut self, var: VarId, lower: f64, upper: f64) -> Result<()> {
        let v = self.vars.get_mut(var.0).ok_or(LpError::UnknownVariable(var))?;
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(LpError::InvalidBounds {
                name: v.name.clone(),
                lower,
                upper,
            });
        }
        if v.kind == VarKind::Binary && (lower < 0.0 || upper > 1.0) {
            return Err(LpError::InvalidBounds {
                name: v.name.clone(),
                lower,
                upper,
            });
        }
        v.lower = lower;
        v.upper = upper;
        Ok(())
    }

    fn check_expr(&self, expr: &LinearExpr, what: &'static str) -> Result<()> {
        if !expr.is_finite() {
            return Err(LpError::NonFinite(what));
        }
        for &(v, _) in expr.terms() {
            if v.0 >= self.vars.len() {
                return Err(LpError::UnknownVariable(v));
            }
        }
        Ok(())
    }

    /// Adds `expr sense rhs`; any constant inside `expr` is folded into `rhs`.
    pub fn add_constraint(&mut self, name: impl Into<String>, expr: LinearExpr, sense: Sense, rhs: f64) -> Result<usize> {
        self.check_expr(&expr, "constraint")?;
        if !rhs.is_finite() {
            return Err(LpError::NonFinite("constraint rhs"));
        }
        let rhs = rhs - expr.constant_term();
        let expr = LinearExpr::from_terms(expr.terms().iter().copied(), 0.0);
        self.constraints.push(Constraint {
            name: name.into(),
            expr,
            sense,
            rhs,
        });
        Ok(self.constraints.len() - 1)
    }

    pub fn set_objective(&mut self, objective: LinearExpr) -> Result<()> {
        self.check_expr(&objective, "objective")?;
        self.objective = objective;
        Ok(())
    }

    pub fn add_to_objective(&mut self, expr: &LinearExpr) -> Result<()> {
        self.check_expr(expr, "objective")?;
        self.objective += expr;
        Ok(())
    }

    /// Adds a fresh `e >= 0` with `e >= expr` and `e >= -expr`, and `weight·e`
    /// to the objective. At any optimum with `weight > 0`, `e = |expr|`.
    pub fn add_abs_term(&mut self, name: impl Into<String>, expr: &LinearExpr, weight: f64) -> Result<VarId> {
        if !(weight >= 0.0) || !weight.is_finite() {
            return Err(LpError::NegativeWeight(weight));
        }
        self.check_expr(expr, "abs term")?;
        let name = name.into();
        let e = self.add_continuous(name.clone(), 0.0, f64::INFINITY)?;
        // e - expr >= 0 and e + expr >= 0
        self.add_constraint(format!("{name}_pos"), LinearExpr::var(e) - expr.clone(), Sense::Ge, 0.0)?;
        self.add_constraint(format!("{name}_neg"), LinearExpr::var(e) + expr.clone(), Sense::Ge, 0.0)?;
        if weight != 0.0 {
            self.objective.add_term(e, weight);
        }
        Ok(e)
    }

    /// Links binary `delta` to `expr` so that `delta = 1 ⇒ expr >= eps_on` and
    /// `delta = 0 ⇒ expr <= eps_off`:
    ///
    /// `expr >= eps_on - M_on·(1 - delta)` and `expr <= eps_off + M_off·delta`.
    ///
    /// The caller is responsible for `M` being large enough to leave the
    /// inactive row redundant; the engine cannot detect an undersized `M`.
    pub fn add_indicator_pair(
        &mut self,
        name: impl Into<String>,
        delta: VarId,
        expr: &LinearExpr,
        eps_on: f64,
        eps_off: f64,
        big_m: BigM,
    ) -> Result<()> {
        let var = self.vars.get(delta.0).ok_or(LpError::UnknownVariable(delta))?;
        if var.kind != VarKind::Binary {
            return Err(LpError::NotBinary(delta));
        }
        for m in [big_m.on, big_m.off] {
            if !(m >= 0.0) || !m.is_finite() {
                return Err(LpError::InvalidBigM(m));
            }
        }
        let name = name.into();
        // expr - M_on·delta >= eps_on - M_on
        let mut on = expr.clone();
        on.add_term(delta, -big_m.on);
        self.add_constraint(format!("{name}_on"), on, Sense::Ge, eps_on - big_m.on)?;
        // expr - M_off·delta <= eps_off
        let mut off = expr.clone();
        off.add_term(delta, -big_m.off);
        self.add_constraint(format!("{name}_off"), off, Sense::Le, eps_off)?;
        Ok(())
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.vars[id.0]
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn objective(&self) -> &LinearExpr {
        &self.objective
    }

    pub fn binaries(&self) -> impl Iterator<Item = VarId> + '_ {
        self.vars
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == VarKind::Binary)
            .map(|(i, _)| VarId(i))
    }

    pub fn num_binaries(&self) -> usize {
        self.binaries().count()
    }

    pub fn find_var(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }
}
