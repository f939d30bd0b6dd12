use std::collections::HashMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, CoreError, Result};
use crate::formulate::{EpsilonConfig, WeightPredicate};
use crate::model::{GivenRanking, Relation, TopKMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    /// Sum of (importance-weighted) position errors over the top-k.
    #[default]
    Sum,
    /// Largest single weighted position error.
    Max,
}

impl FromStr for ObjectiveKind {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Self::Sum),
            "max" => Ok(Self::Max),
            other => Err(invalid(format!("unknown objective `{other}`"))),
        }
    }
}

/// Everything that defines one explanation problem.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub relation: Relation,
    pub ranking: GivenRanking,
    pub k: usize,
    pub predicate: WeightPredicate,
    /// Importance factor per tuple index.
    pub importance: Vec<f64>,
    pub eps: EpsilonConfig,
    pub objective: ObjectiveKind,
    pub top_k_mode: TopKMode,
    /// Optional per-weight box intersected with `[0, 1]` (cell restriction).
    pub weight_bounds: Option<Vec<(f64, f64)>>,
}

impl ProblemSpec {
    pub fn new(relation: Relation, ranking: GivenRanking, k: usize) -> Result<Self> {
        if ranking.len() != relation.n() {
            return Err(invalid("ranking and relation sizes differ"));
        }
        if k == 0 || k > relation.n() {
            return Err(invalid(format!("k must lie in 1..={}", relation.n())));
        }
        let m = relation.m();
        let n = relation.n();
        Ok(Self {
            relation,
            ranking,
            k,
            predicate: WeightPredicate::empty(m),
            importance: vec![1.0; n],
            eps: EpsilonConfig::default(),
            objective: ObjectiveKind::Sum,
            top_k_mode: TopKMode::PermutationOrder,
            weight_bounds: None,
        })
    }

    pub fn with_predicate(mut self, predicate: WeightPredicate) -> Result<Self> {
        if predicate.m() != self.relation.m() {
            return Err(CoreError::DimensionMismatch {
                expected: self.relation.m(),
                got: predicate.m(),
            });
        }
        self.predicate = predicate;
        Ok(self)
    }

    pub fn with_eps(mut self, eps: EpsilonConfig) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_objective(mut self, objective: ObjectiveKind) -> Self {
        self.objective = objective;
        self
    }

    pub fn with_top_k_mode(mut self, mode: TopKMode) -> Self {
        self.top_k_mode = mode;
        self
    }

    /// Importance factors by tuple id; unlisted tuples keep factor 1.
    pub fn with_importance(mut self, factors: &HashMap<String, f64>) -> Result<Self> {
        for (id, &u) in factors {
            let t = self
                .relation
                .index_of(id)
                .ok_or_else(|| CoreError::UnknownId(id.clone()))?;
            if !(u >= 0.0 && u.is_finite()) {
                return Err(invalid(format!("importance of `{id}` must be a nonnegative number")));
            }
            self.importance[t] = u;
        }
        Ok(self)
    }

    pub fn with_weight_bounds(mut self, bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.len() != self.relation.m() {
            return Err(CoreError::DimensionMismatch {
                expected: self.relation.m(),
                got: bounds.len(),
            });
        }
        self.weight_bounds = Some(bounds);
        Ok(self)
    }

    /// Tuple indices of the top-k prefix.
    pub fn top_k(&self) -> &[usize] {
        self.ranking.top_k(self.k, self.top_k_mode)
    }

    /// Effective bounds of each weight variable.
    pub fn weight_box(&self) -> Result<Vec<(f64, f64)>> {
        let m = self.relation.m();
        let bounds: Vec<(f64, f64)> = match &self.weight_bounds {
            None => vec![(0.0, 1.0); m],
            Some(b) => b.iter().map(|&(lo, hi)| (lo.max(0.0), hi.min(1.0))).collect(),
        };
        if bounds.iter().any(|&(lo, hi)| !(lo <= hi)) {
            return Err(invalid("empty weight box"));
        }
        Ok(bounds)
    }

    /// Spacing of attainable objective values when all top-k importance
    /// factors are integers.
    pub fn objective_step(&self) -> Option<f64> {
        self.top_k()
            .iter()
            .all(|&t| self.importance[t].fract() == 0.0)
            .then_some(1.0)
    }

    /// The problem restricted to the tuples at given-ranking positions
    /// `start..start + len`, explaining their top `k`. Returns the original
    /// indices of the kept tuples.
    pub fn window(&self, start: usize, len: usize, k: usize) -> Result<(Self, Vec<usize>)> {
        let (ranking, keep) = self.ranking.window(start, len);
        if keep.is_empty() {
            return Err(invalid("empty window"));
        }
        let mut sub = Self::new(self.relation.subset(&keep), ranking, k.min(keep.len()))?;
        sub.predicate = self.predicate.clone();
        sub.importance = keep.iter().map(|&t| self.importance[t]).collect();
        sub.eps = self.eps;
        sub.objective = self.objective;
        sub.top_k_mode = self.top_k_mode;
        sub.weight_bounds = self.weight_bounds.clone();
        Ok((sub, keep))
    }
}
