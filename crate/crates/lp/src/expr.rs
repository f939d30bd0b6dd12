//! Sparse affine expressions over program variables.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Index of a variable inside a [`Program`](crate::Program).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl VarId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// `Σ coef·var + constant`, kept sorted by variable with no zero entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearExpr {
    terms: Vec<(VarId, f64)>,
    constant: f64,
}

impl LinearExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(value: f64) -> Self {
        Self {
            terms: Vec::new(),
            constant: value,
        }
    }

    pub fn var(var: VarId) -> Self {
        Self::term(var, 1.0)
    }

    pub fn term(var: VarId, coef: f64) -> Self {
        let mut e = Self::new();
        e.add_term(var, coef);
        e
    }

    /// Builds an expression from arbitrary (possibly repeated) terms.
    pub fn from_terms<I: IntoIterator<Item = (VarId, f64)>>(terms: I, constant: f64) -> Self {
        let mut raw: Vec<(VarId, f64)> = terms.into_iter().collect();
        raw.sort_by_key(|&(v, _)| v);
        let mut merged: Vec<(VarId, f64)> = Vec::with_capacity(raw.len());
        for (v, c) in raw {
            match merged.last_mut() {
                Some((last, acc)) if *last == v => *acc += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0.0);
        Self {
            terms: merged,
            constant,
        }
    }

    pub fn add_term(&mut self, var: VarId, coef: f64) {
        match self.terms.binary_search_by_key(&var, |&(v, _)| v) {
            Ok(pos) => {
                self.terms[pos].1 += coef;
                if self.terms[pos].1 == 0.0 {
                    self.terms.remove(pos);
                }
            }
            Err(pos) => {
                if coef != 0.0 {
                    self.terms.insert(pos, (var, coef));
                }
            }
        }
    }

    pub fn add_constant(&mut self, value: f64) {
        self.constant += value;
    }

    pub fn terms(&self) -> &[(VarId, f64)] {
        &self.terms
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    pub fn coefficient(&self, var: VarId) -> f64 {
        self.terms
            .binary_search_by_key(&var, |&(v, _)| v)
            .map(|pos| self.terms[pos].1)
            .unwrap_or(0.0)
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty()
    }

    /// Value of the expression under a dense assignment indexed by `VarId`.
    pub fn eval(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|&(v, c)| c * values[v.0])
            .sum::<f64>()
            + self.constant
    }

    pub fn scaled(&self, factor: f64) -> Self {
        if factor == 0.0 {
            return Self::new();
        }
        Self {
            terms: self.terms.iter().map(|&(v, c)| (v, c * factor)).collect(),
            constant: self.constant * factor,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.constant.is_finite() && self.terms.iter().all(|(_, c)| c.is_finite())
    }
}

impl From<VarId> for LinearExpr {
    fn from(v: VarId) -> Self {
        LinearExpr::var(v)
    }
}

impl AddAssign<&LinearExpr> for LinearExpr {
    fn add_assign(&mut self, rhs: &LinearExpr) {
        if rhs.terms.is_empty() {
            self.constant += rhs.constant;
            return;
        }
        let merged = self.terms.iter().chain(rhs.terms.iter()).copied();
        *self = LinearExpr::from_terms(merged, self.constant + rhs.constant);
    }
}

impl Add for LinearExpr {
    type Output = LinearExpr;
    fn add(mut self, rhs: LinearExpr) -> LinearExpr {
        self += &rhs;
        self
    }
}

impl Sub for LinearExpr {
    type Output = LinearExpr;
    fn sub(mut self, rhs: LinearExpr) -> LinearExpr {
        self += &rhs.scaled(-1.0);
        self
    }
}

impl Neg for LinearExpr {
    type Output = LinearExpr;
    fn neg(self) -> LinearExpr {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for LinearExpr {
    type Output = LinearExpr;
    fn mul(self, rhs: f64) -> LinearExpr {
        self.scaled(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_and_drops_zero_terms() {
        let e = LinearExpr::from_terms([(VarId(2), 1.0), (VarId(0), 3.0), (VarId(2), -1.0)], 4.0);
        assert_eq!(e.terms(), &[(VarId(0), 3.0)]);
        assert_eq!(e.constant_term(), 4.0);
    }

    #[test]
    fn arithmetic() {
        let a = LinearExpr::var(VarId(0)) + LinearExpr::term(VarId(1), 2.0);
        let b = LinearExpr::var(VarId(0)) - LinearExpr::constant(1.0);
        let diff = a - b;
        assert_eq!(diff.terms(), &[(VarId(1), 2.0)]);
        assert_eq!(diff.constant_term(), 1.0);
        assert_eq!(diff.eval(&[5.0, 1.5]), 4.0);
    }
}
