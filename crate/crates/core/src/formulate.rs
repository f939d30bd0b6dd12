//! Builds engine programs from a problem: the exact-reproduction LP (a chain
//! of adjacent comparisons plus boundary comparisons against the k-th tuple)
//! and the position-error MILP with one indicator per undecided tuple pair.
//!
//! Strict score comparisons are modeled with a gap `eps1`, ties with an upper
//! threshold `eps2`. Pairs whose comparison is fixed for every admissible
//! weight vector by componentwise dominance get no indicator variable.

use std::collections::HashMap;

use rankfit_lp::{BigM, LinearExpr, Program, Sense, VarId};
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::model::{dot, RankRelation, Relation};
use crate::problem::{ObjectiveKind, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsilonConfig {
    /// Engine feasibility tolerance, also used as the verification tie
    /// tolerance.
    pub tau: f64,
    /// Minimum score gap for a strict comparison.
    pub eps1: f64,
    /// Maximum score difference still counted as "not above".
    pub eps2: f64,
    pub factor: f64,
    pub max_escalations: usize,
}

impl Default for EpsilonConfig {
    fn default() -> Self {
        Self {
            tau: 1e-9,
            eps1: 1e-4,
            eps2: 0.0,
            factor: 10.0,
            max_escalations: 8,
        }
    }
}

impl EpsilonConfig {
    /// Smallest admissible `eps1`: twice the next float above `tau`.
    pub fn min_eps1(tau: f64) -> f64 {
        2.0 * tau.next_up()
    }

    pub fn with_eps1(mut self, eps1: f64) -> Self {
        self.eps1 = eps1;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(CoreError::Invalid(msg.to_string()));
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad("tau must be positive");
        }
        if !(self.eps1 >= Self::min_eps1(self.tau)) {
            return bad("eps1 must be at least twice the engine tolerance");
        }
        if !(self.eps1 - self.eps2 > 2.0 * self.tau) {
            return bad("eps1 - eps2 must exceed twice the engine tolerance");
        }
        if !(self.factor > 1.0) {
            return bad("escalation factor must exceed 1");
        }
        Ok(())
    }
}

/// Linear constraints on the weights, in addition to the implicit
/// `w >= 0` and `sum(w) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightPredicate {
    m: usize,
    rows: Vec<PredicateRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredicateRow {
    pub coefs: Vec<f64>,
    pub sense: PredicateSense,
    pub rhs: f64,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredicateSense {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

impl PredicateSense {
    fn to_lp(self) -> Sense {
        match self {
            Self::Le => Sense::Le,
            Self::Ge => Sense::Ge,
            Self::Eq => Sense::Eq,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Name(String),
    Plus,
    Minus,
    Star,
    Op(PredicateSense),
}

fn tokenize(line: &str) -> std::result::Result<Vec<Token>, String> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '<' | '>' | '=' | '!' => {
                let next = chars.get(i + 1).copied();
                let (tok, len) = match (c, next) {
                    ('<', Some('=')) => (PredicateSense::Le, 2),
                    ('>', Some('=')) => (PredicateSense::Ge, 2),
                    ('=', Some('=')) => (PredicateSense::Eq, 2),
                    ('=', _) => (PredicateSense::Eq, 1),
                    ('<', _) | ('>', _) => {
                        return Err("strict comparisons are not supported; use <= or >=".into())
                    }
                    _ => return Err(format!("unexpected `{c}`")),
                };
                out.push(Token::Op(tok));
                i += len;
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v = text.parse::<f64>().map_err(|_| format!("bad number `{text}`"))?;
                out.push(Token::Num(v));
            }
            _ => {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() && !"+-*<>=!".contains(chars[i]) {
                    i += 1;
                }
                out.push(Token::Name(chars[start..i].iter().collect()));
            }
        }
    }
    Ok(out)
}

/// Parses `term (+|- term)*` with `term := [number [*]] name | number`,
/// returning attribute coefficients and the constant.
fn parse_side(tokens: &[Token], columns: &[String]) -> std::result::Result<(Vec<f64>, f64), String> {
    let mut coefs = vec![0.0; columns.len()];
    let mut constant = 0.0;
    let mut i = 0;
    let mut first = true;
    if tokens.is_empty() {
        return Err("empty side".into());
    }
    while i < tokens.len() {
        let mut sign = 1.0;
        match tokens[i] {
            Token::Plus => i += 1,
            Token::Minus => {
                sign = -1.0;
                i += 1;
            }
            _ if first => {}
            _ => return Err("expected `+` or `-` between terms".into()),
        }
        first = false;
        let mut factor = sign;
        let mut has_number = false;
        if let Some(Token::Num(v)) = tokens.get(i) {
            factor *= v;
            has_number = true;
            i += 1;
            if tokens.get(i) == Some(&Token::Star) {
                i += 1;
                if !matches!(tokens.get(i), Some(Token::Name(_))) {
                    return Err("expected an attribute after `*`".into());
                }
            }
        }
        match tokens.get(i) {
            Some(Token::Name(name)) => {
                let idx = columns
                    .iter()
                    .position(|c| c == name)
                    .ok_or_else(|| format!("unknown attribute `{name}`"))?;
                coefs[idx] += factor;
                i += 1;
            }
            _ if has_number => constant += factor,
            _ => return Err("expected a number or attribute".into()),
        }
    }
    Ok((coefs, constant))
}

impl WeightPredicate {
    pub fn empty(m: usize) -> Self {
        Self { m, rows: Vec::new() }
    }

    /// Parses one constraint per line, e.g. `PTS <= 0.1` or
    /// `BLK <= PTS + AST`. Blank lines and `#` comments are ignored.
    pub fn parse<S: AsRef<str>>(columns: &[String], lines: &[S]) -> Result<Self> {
        let mut pred = Self::empty(columns.len());
        let mut lineno = 0;
        for chunk in lines {
            for raw in chunk.as_ref().lines() {
                lineno += 1;
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let err = |message: String| CoreError::Predicate { line: lineno, message };
                let tokens = tokenize(line).map_err(err)?;
                let ops: Vec<usize> = tokens
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| matches!(t, Token::Op(_)))
                    .map(|(i, _)| i)
                    .collect();
                if ops.len() != 1 {
                    return Err(err("expected exactly one of <=, >=, =".into()));
                }
                let Token::Op(sense) = tokens[ops[0]] else { unreachable!() };
                let (lc, lk) = parse_side(&tokens[..ops[0]], columns).map_err(err)?;
                let (rc, rk) = parse_side(&tokens[ops[0] + 1..], columns).map_err(err)?;
                let coefs: Vec<f64> = lc.iter().zip(&rc).map(|(a, b)| a - b).collect();
                if coefs.iter().all(|&c| c == 0.0) {
                    return Err(err("constraint does not mention any attribute".into()));
                }
                pred.rows.push(PredicateRow {
                    coefs,
                    sense,
                    rhs: rk - lk,
                    text: line.to_string(),
                });
            }
        }
        Ok(pred)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> &[PredicateRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push(&mut self, row: PredicateRow) {
        self.rows.push(row);
    }

    /// Whether `w` satisfies every row within `tol`.
    pub fn admits(&self, w: &[f64], tol: f64) -> bool {
        self.rows.iter().all(|r| {
            let a = dot(&r.coefs, w);
            match r.sense {
                PredicateSense::Le => a <= r.rhs + tol,
                PredicateSense::Ge => a >= r.rhs - tol,
                PredicateSense::Eq => (a - r.rhs).abs() <= tol,
            }
        })
    }
}

/// Componentwise dominance between tuples.
#[derive(Debug, Clone)]
pub struct DominanceIndex {
    dominators: Vec<Vec<usize>>,
    dominatees: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairClass {
    Dominates,
    DominatedBy,
    Identical,
    Incomparable,
}

/// How `a` relates to `b` componentwise.
pub fn classify_pair(a: &[f64], b: &[f64]) -> PairClass {
    let mut ge = true;
    let mut le = true;
    for (x, y) in a.iter().zip(b) {
        ge &= x >= y;
        le &= x <= y;
    }
    match (ge, le) {
        (true, true) => PairClass::Identical,
        (true, false) => PairClass::Dominates,
        (false, true) => PairClass::DominatedBy,
        (false, false) => PairClass::Incomparable,
    }
}

pub fn compute_dominance(relation: &Relation) -> DominanceIndex {
    let n = relation.n();
    let mut dominators = vec![Vec::new(); n];
    let mut dominatees = vec![Vec::new(); n];
    for a in 0..n {
        for b in a + 1..n {
            match classify_pair(relation.attrs(a), relation.attrs(b)) {
                PairClass::Dominates => {
                    dominators[b].push(a);
                    dominatees[a].push(b);
                }
                PairClass::DominatedBy => {
                    dominators[a].push(b);
                    dominatees[b].push(a);
                }
                _ => {}
            }
        }
    }
    DominanceIndex { dominators, dominatees }
}

impl DominanceIndex {
    /// Tuples that dominate `r`.
    pub fn dominators(&self, r: usize) -> &[usize] {
        &self.dominators[r]
    }

    pub fn dominatees(&self, r: usize) -> &[usize] {
        &self.dominatees[r]
    }

    pub fn dominates(&self, s: usize, r: usize) -> bool {
        self.dominators[r].binary_search(&s).is_ok()
    }
}

pub(crate) fn weight_vars(spec: &ProblemSpec, p: &mut Program) -> Result<Vec<VarId>> {
    let bounds = spec.weight_box()?;
    let ws = spec
        .relation
        .columns()
        .iter()
        .zip(&bounds)
        .map(|(name, &(lo, hi))| p.add_continuous(format!("w_{name}"), lo, hi))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let sum = LinearExpr::from_terms(ws.iter().map(|&w| (w, 1.0)), 0.0);
    p.add_constraint("simplex", sum, Sense::Eq, 1.0)?;
    for (i, row) in spec.predicate.rows().iter().enumerate() {
        let e = LinearExpr::from_terms(ws.iter().zip(&row.coefs).map(|(&w, &c)| (w, c)), 0.0);
        p.add_constraint(format!("pred{i}"), e, row.sense.to_lp(), row.rhs)?;
    }
    Ok(ws)
}

/// `Σ_i w_i (a.A_i − b.A_i)`.
pub(crate) fn diff_expr(ws: &[VarId], a: &[f64], b: &[f64]) -> LinearExpr {
    LinearExpr::from_terms(ws.iter().zip(a.iter().zip(b)).map(|(&w, (x, y))| (w, x - y)), 0.0)
}

/// Smallest and largest value of `w·d` over simplex points inside `bounds`,
/// by filling the free mass greedily from the smallest or largest `d_i`.
pub fn score_gap_range(d: &[f64], bounds: &[(f64, f64)]) -> (f64, f64) {
    let base: f64 = bounds.iter().map(|b| b.0).sum();
    let mut idx: Vec<usize> = (0..d.len()).collect();
    idx.sort_by(|&a, &b| d[a].total_cmp(&d[b]).then(a.cmp(&b)));
    let fill = |order: &mut dyn Iterator<Item = &usize>| {
        let mut free = (1.0 - base).max(0.0);
        let mut v: f64 = bounds.iter().zip(d).map(|(b, x)| b.0 * x).sum();
        for &i in order {
            let add = free.min(bounds[i].1 - bounds[i].0);
            v += add * d[i];
            free -= add;
        }
        v
    };
    (fill(&mut idx.iter()), fill(&mut idx.iter().rev()))
}

/// Variable ids of a built exact-reproduction program.
#[derive(Debug, Clone)]
pub struct SatLayout {
    pub weights: Vec<VarId>,
    /// Number of ranking comparison rows.
    pub ranking_rows: usize,
}

/// Feasibility LP whose solutions reproduce the top-k exactly: adjacent
/// top-k pairs must be separated by `eps1` (or be equal for ties), and every
/// tuple after the top-k must score at most the k-th tuple.
pub fn build_sat(spec: &ProblemSpec) -> Result<(Program, SatLayout)> {
    let mut p = Program::new();
    let ws = weight_vars(spec, &mut p)?;
    let order = spec.ranking.order();
    let k = spec.top_k().len();
    let rel = &spec.relation;
    let mut rows = 0;
    for j in 0..k.saturating_sub(1) {
        let (a, b) = (order[j], order[j + 1]);
        let e = diff_expr(&ws, rel.attrs(a), rel.attrs(b));
        match spec.ranking.relations()[j] {
            RankRelation::Greater => p.add_constraint(format!("chain{j}"), e, Sense::Ge, spec.eps.eps1)?,
            RankRelation::Equal => p.add_constraint(format!("chain{j}"), e, Sense::Eq, 0.0)?,
        };
        rows += 1;
    }
    if k > 0 {
        let last = order[k - 1];
        for (j, &t) in order.iter().enumerate().skip(k) {
            p.add_constraint(format!("bound{j}"), diff_expr(&ws, rel.attrs(last), rel.attrs(t)), Sense::Ge, 0.0)?;
            rows += 1;
        }
    }
    Ok((
        p,
        SatLayout {
            weights: ws,
            ranking_rows: rows,
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorPair {
    /// Tuple that may score above `below`.
    pub above: usize,
    pub below: usize,
    pub var: VarId,
    pub big_m: BigM,
}

/// Variable ids and pair bookkeeping of a position-error program.
#[derive(Debug, Clone)]
pub struct IndicatorLayout {
    pub weights: Vec<VarId>,
    pub top_k: Vec<usize>,
    pub pairs: Vec<IndicatorPair>,
    /// Per top-k tuple: pairs resolved as "not above" without a variable.
    pub resolved_below: Vec<usize>,
    /// Per top-k tuple: pairs resolved as "above" without a variable.
    pub resolved_above: Vec<usize>,
    /// Per top-k tuple: its error variable (sum objective), or the single
    /// shared variable (max objective).
    pub error_vars: Vec<VarId>,
    lookup: HashMap<(usize, usize), usize>,
    resolved: HashMap<(usize, usize), bool>,
}

impl IndicatorLayout {
    pub fn num_binaries(&self) -> usize {
        self.pairs.len()
    }

    pub fn indicator(&self, above: usize, below: usize) -> Option<VarId> {
        self.lookup.get(&(above, below)).map(|&i| self.pairs[i].var)
    }

    /// Value fixed for a pair during construction, if any.
    pub fn resolved(&self, above: usize, below: usize) -> Option<bool> {
        self.resolved.get(&(above, below)).copied()
    }

    /// Full program assignment induced by weights `w`, or `None` when some
    /// pair's score difference falls strictly inside `(eps2, eps1)` (more
    /// than `slack` away from either threshold).
    pub fn assignment_for(&self, spec: &ProblemSpec, program: &Program, w: &[f64], slack: f64) -> Option<Vec<f64>> {
        let mut x = vec![0.0; program.num_vars()];
        for (&v, &wi) in self.weights.iter().zip(w) {
            x[v.0] = wi;
        }
        let rel = &spec.relation;
        for pair in &self.pairs {
            let d = dot(w, rel.attrs(pair.above)) - dot(w, rel.attrs(pair.below));
            x[pair.var.0] = if d >= spec.eps.eps1 - slack {
                1.0
            } else if d <= spec.eps.eps2 + slack {
                0.0
            } else {
                return None;
            };
        }
        let mut worst: f64 = 0.0;
        for (i, &r) in self.top_k.iter().enumerate() {
            let above: f64 = self
                .pairs
                .iter()
                .filter(|p| p.below == r)
                .map(|p| x[p.var.0])
                .sum::<f64>()
                + self.resolved_above[i] as f64;
            let err = spec.importance[r] * (spec.ranking.rank(r) as f64 - 1.0 - above).abs();
            match spec.objective {
                ObjectiveKind::Sum => x[self.error_vars[i].0] = err,
                ObjectiveKind::Max => worst = worst.max(err),
            }
        }
        if spec.objective == ObjectiveKind::Max {
            if let Some(e) = self.error_vars.first() {
                x[e.0] = worst;
            }
        }
        Some(x)
    }

    pub fn weights_of(&self, values: &[f64]) -> Vec<f64> {
        self.weights.iter().map(|v| values[v.0]).collect()
    }
}

/// Position-error MILP. With `prune`, pairs whose comparison holds for every
/// weight vector in the weight box get no variable: when the largest score
/// gap `s − r` is at most `eps2` the pair is "not above", when the smallest
/// is at least `eps1` it is "above". Both tests are exact, so pruning never
/// changes the optimum. The big-M of each row is the exact gap range, so
/// inactive rows are just redundant.
pub fn build_opt(spec: &ProblemSpec, prune: bool) -> Result<(Program, IndicatorLayout)> {
    let mut p = Program::new();
    let ws = weight_vars(spec, &mut p)?;
    let rel = &spec.relation;
    let (eps1, eps2) = (spec.eps.eps1, spec.eps.eps2);
    let top_k = spec.top_k().to_vec();
    let mut pairs = Vec::new();
    let mut lookup = HashMap::new();
    let mut resolved = HashMap::new();
    let mut resolved_below = vec![0; top_k.len()];
    let mut resolved_above = vec![0; top_k.len()];
    let mut counts: Vec<LinearExpr> = Vec::with_capacity(top_k.len());
    let bounds = spec.weight_box()?;
    for (i, &r) in top_k.iter().enumerate() {
        let mut above_sum = LinearExpr::new();
        for s in 0..rel.n() {
            if s == r {
                continue;
            }
            let d: Vec<f64> = rel.attrs(s).iter().zip(rel.attrs(r)).map(|(a, b)| a - b).collect();
            let (min_d, max_d) = score_gap_range(&d, &bounds);
            if prune && max_d <= eps2 {
                resolved_below[i] += 1;
                resolved.insert((s, r), false);
                continue;
            }
            if prune && min_d >= eps1 {
                resolved_above[i] += 1;
                resolved.insert((s, r), true);
                continue;
            }
            let big_m = BigM {
                on: (eps1 - min_d).max(0.0),
                off: (max_d - eps2).max(0.0),
            };
            let var = p.add_binary(format!("d_{}_{}", rel.id(s), rel.id(r)));
            let e = diff_expr(&ws, rel.attrs(s), rel.attrs(r));
            p.add_indicator_pair(format!("ind_{s}_{r}"), var, &e, eps1, eps2, big_m)?;
            lookup.insert((s, r), pairs.len());
            pairs.push(IndicatorPair {
                above: s,
                below: r,
                var,
                big_m,
            });
            above_sum.add_term(var, 1.0);
        }
        // π(r) − 1 − (resolved above) − Σ δ_sr
        let base = spec.ranking.rank(r) as f64 - 1.0 - resolved_above[i] as f64;
        counts.push(LinearExpr::constant(base) - above_sum);
    }
    // Two tuples cannot each be strictly above the other.
    for pair in &pairs {
        if pair.above < pair.below {
            if let Some(&j) = lookup.get(&(pair.below, pair.above)) {
                let e = LinearExpr::from_terms([(pair.var, 1.0), (pairs[j].var, 1.0)], 0.0);
                p.add_constraint(format!("order_{}_{}", pair.above, pair.below), e, Sense::Le, 1.0)?;
            }
        }
    }
    let error_vars = match spec.objective {
        ObjectiveKind::Sum => top_k
            .iter()
            .zip(&counts)
            .map(|(&r, e)| p.add_abs_term(format!("err_{}", rel.id(r)), e, spec.importance[r]))
            .collect::<std::result::Result<Vec<_>, _>>()?,
        ObjectiveKind::Max => {
            let worst = p.add_continuous("err_max", 0.0, f64::INFINITY)?;
            for (&r, e) in top_k.iter().zip(&counts) {
                let u = spec.importance[r];
                let scaled = e.scaled(u);
                p.add_constraint(format!("max_hi_{r}"), LinearExpr::var(worst) - scaled.clone(), Sense::Ge, 0.0)?;
                p.add_constraint(format!("max_lo_{r}"), LinearExpr::var(worst) + scaled, Sense::Ge, 0.0)?;
            }
            p.set_objective(LinearExpr::var(worst))?;
            vec![worst; top_k.len()]
        }
    };
    Ok((
        p,
        IndicatorLayout {
            weights: ws,
            top_k,
            pairs,
            resolved_below,
            resolved_above,
            error_vars,
            lookup,
            resolved,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cols(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_bounds_and_relative_rows() {
        let c = cols(&["PTS", "AST", "BLK"]);
        let p = WeightPredicate::parse(&c, &["PTS <= 0.1", "BLK <= PTS + AST", "# comment", "", "2*AST - 0.5 PTS >= 1e-2"])
            .unwrap();
        assert_eq!(p.rows().len(), 3);
        assert_eq!(p.rows()[0].coefs, vec![1.0, 0.0, 0.0]);
        assert_eq!(p.rows()[0].rhs, 0.1);
        assert_eq!(p.rows()[1].coefs, vec![-1.0, -1.0, 1.0]);
        assert_eq!(p.rows()[1].sense, PredicateSense::Le);
        assert_eq!(p.rows()[1].rhs, 0.0);
        assert_eq!(p.rows()[2].coefs, vec![-0.5, 2.0, 0.0]);
        assert_eq!(p.rows()[2].rhs, 1e-2);
    }

    #[test]
    fn rejects_bad_predicates() {
        let c = cols(&["A1", "A2"]);
        for bad in ["A3 <= 0.1", "A1 < 0.2", "A1 > 0", "A1 0.3", "A1 <= A2 <= 1", "0.2 <= 0.3", "A1 <= * 2"] {
            let err = WeightPredicate::parse(&c, &[bad]).unwrap_err();
            assert!(matches!(err, CoreError::Predicate { line: 1, .. }), "{bad}");
        }
        assert!(WeightPredicate::parse(&c, &["A1 >= 0"]).is_ok());
    }

    #[test]
    fn classifies_pairs() {
        assert_eq!(classify_pair(&[4.0, 1.0, 15.0], &[1.0, 1.0, 14.0]), PairClass::Dominates);
        assert_eq!(classify_pair(&[3.0, 2.0, 8.0], &[4.0, 1.0, 15.0]), PairClass::Incomparable);
        assert_eq!(classify_pair(&[1.0, 1.0], &[1.0, 2.0]), PairClass::DominatedBy);
        assert_eq!(classify_pair(&[1.0], &[1.0]), PairClass::Identical);
    }

    #[test]
    fn eps_validation() {
        assert!(EpsilonConfig::default().validate().is_ok());
        let tau = 1e-9;
        let floor = EpsilonConfig::min_eps1(tau);
        assert!(floor > 2.0 * tau);
        assert!(EpsilonConfig::default().with_eps1(floor).validate().is_ok());
        assert!(EpsilonConfig::default().with_eps1(2.0 * tau).validate().is_err());
        assert!(EpsilonConfig::default().with_eps1(1e-10).validate().is_err());
    }
}
