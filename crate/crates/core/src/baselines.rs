//! Competitor methods: least-squares regression on ranks, ordinal regression
//! with a hinge penalty, and random sampling of the weight simplex. Each also
//! serves as a seed for cell-restricted search.

use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rankfit_lp::{solve_lp, LinearExpr, Program, Sense, SolverConfig, Status};

use crate::error::{invalid, Result};
use crate::evalverify::{position_error, ExplanationReport};
use crate::formulate::{diff_expr, weight_vars};
use crate::model::{GivenRanking, RankRelation, Relation, WeightVector};
use crate::problem::ProblemSpec;

/// Ridge added to the normal equations when they are singular.
const RIDGE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    /// Least-squares coefficient per attribute.
    pub raw: Vec<f64>,
    pub intercept: f64,
    /// `raw` with negatives clipped and rescaled onto the simplex.
    pub projected: WeightVector,
}

/// Fits `Σ w_i A_i + b` to the label `−rank` over all tuples.
pub fn linear_regression_weights(relation: &Relation, ranking: &GivenRanking) -> Result<LinearFit> {
    let (n, m) = (relation.n(), relation.m());
    if ranking.len() != n {
        return Err(invalid("ranking and relation sizes differ"));
    }
    let x = DMatrix::from_fn(n, m + 1, |i, j| if j < m { relation.attrs(i)[j] } else { 1.0 });
    let y = DVector::from_fn(n, |i, _| -(ranking.rank(i) as f64));
    let xt = x.transpose();
    let gram = &xt * &x;
    let rhs = &xt * &y;
    let beta = match gram.clone().cholesky() {
        Some(c) => c.solve(&rhs),
        None => {
            let scale = (gram.trace() / (m + 1) as f64).max(1.0);
            let ridged = gram + DMatrix::identity(m + 1, m + 1) * (RIDGE * scale);
            match ridged.clone().cholesky() {
                Some(c) => c.solve(&rhs),
                None => ridged
                    .lu()
                    .solve(&rhs)
                    .ok_or_else(|| invalid("regression system is singular"))?,
            }
        }
    };
    let raw: Vec<f64> = beta.iter().take(m).copied().collect();
    Ok(LinearFit {
        projected: WeightVector::project(&raw),
        intercept: beta[m],
        raw,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrdinalFit {
    pub weights: WeightVector,
    /// Sum of hinge violations over the chain and boundary pairs.
    pub penalty: f64,
}

/// One hinge term: `f(high) − f(low) ≥ offset`.
#[derive(Debug, Clone, Copy)]
struct HingePair {
    high: usize,
    low: usize,
    offset: f64,
}

/// Chain pairs between adjacent top-k tuples (both directions for ties) and
/// boundary pairs between the last top-k tuple and every later tuple.
fn hinge_pairs(spec: &ProblemSpec) -> Vec<HingePair> {
    let order = spec.ranking.order();
    let k = spec.top_k().len();
    let mut pairs = Vec::new();
    for j in 0..k.saturating_sub(1) {
        let (a, b) = (order[j], order[j + 1]);
        match spec.ranking.relations()[j] {
            RankRelation::Greater => pairs.push(HingePair {
                high: a,
                low: b,
                offset: spec.eps.eps1,
            }),
            RankRelation::Equal => {
                pairs.push(HingePair { high: a, low: b, offset: 0.0 });
                pairs.push(HingePair { high: b, low: a, offset: 0.0 });
            }
        }
    }
    if k > 0 {
        let last = order[k - 1];
        for &t in &order[k..] {
            pairs.push(HingePair {
                high: last,
                low: t,
                offset: 0.0,
            });
        }
    }
    pairs
}

/// Hinge penalty of `w` on the chain and boundary pairs. Violations within
/// the tie tolerance count as zero.
pub fn hinge_penalty(spec: &ProblemSpec, w: &[f64]) -> f64 {
    let sc = crate::model::scores(&spec.relation, w);
    hinge_pairs(spec)
        .iter()
        .map(|p| p.offset - (sc[p.high] - sc[p.low]))
        .filter(|&v| v > spec.eps.tau)
        .sum()
}

/// Minimizes the total hinge violation over admissible weights.
pub fn ordinal_regression_weights(spec: &ProblemSpec) -> Result<OrdinalFit> {
    let mut p = Program::new();
    let ws = weight_vars(spec, &mut p)?;
    let rel = &spec.relation;
    let mut objective = LinearExpr::new();
    for (i, pair) in hinge_pairs(spec).into_iter().enumerate() {
        let xi = p.add_continuous(format!("xi{i}"), 0.0, f64::INFINITY)?;
        let mut e = diff_expr(&ws, rel.attrs(pair.high), rel.attrs(pair.low));
        e.add_term(xi, 1.0);
        p.add_constraint(format!("hinge{i}"), e, Sense::Ge, pair.offset)?;
        objective.add_term(xi, 1.0);
    }
    p.set_objective(objective)?;
    let config = SolverConfig::default().with_feasibility_tol(spec.eps.tau);
    let sol = solve_lp(&p, &config)?;
    if sol.status != Status::Optimal {
        return Err(invalid(format!("ordinal regression LP ended with {:?}", sol.status)));
    }
    let w = WeightVector::project(&ws.iter().map(|&v| sol.value(v)).collect::<Vec<_>>());
    let penalty = hinge_penalty(spec, w.as_slice());
    Ok(OrdinalFit { weights: w, penalty })
}

/// Sum over ordered pairs of the given ranking of how far the lower-ranked
/// tuple's score exceeds the higher-ranked one's. Tied pairs are skipped.
pub fn pairwise_penalty(ranking: &GivenRanking, scores: &[f64]) -> f64 {
    let order = ranking.order();
    let mut total = 0.0;
    for (i, &a) in order.iter().enumerate() {
        for &b in &order[i + 1..] {
            if ranking.rank(a) < ranking.rank(b) {
                total += (scores[b] - scores[a]).max(0.0);
            }
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SampleBudget {
    Count(usize),
    Time(Duration),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleResult {
    /// Best admissible sample, if any sample was admissible.
    pub weights: Option<WeightVector>,
    pub error: f64,
    /// Samples drawn, admissible or not.
    pub samples: usize,
    pub admissible: usize,
}

/// Draws a uniform point of the simplex from normalized exponential variates.
fn simplex_sample(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..m).map(|_| Exp1.sample(rng)).collect();
    let sum: f64 = w.iter().sum();
    if sum > 0.0 {
        w.iter_mut().for_each(|x| *x /= sum);
        w
    } else {
        WeightVector::uniform(m).as_slice().to_vec()
    }
}

/// Samples weight vectors uniformly from the simplex and keeps the one with
/// the lowest error. Samples outside the predicate or weight box are drawn
/// but skipped. The stream depends only on `seed`.
pub fn sampling_search(spec: &ProblemSpec, budget: SampleBudget, seed: u64) -> Result<SampleResult> {
    match budget {
        SampleBudget::Count(0) => return Err(invalid("sample budget must be positive")),
        SampleBudget::Time(d) if d.is_zero() => return Err(invalid("sample budget must be positive")),
        _ => {}
    }
    let bounds = spec.weight_box()?;
    let tau = spec.eps.tau;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Instant::now();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut samples = 0;
    let mut admissible = 0;
    loop {
        let done = match budget {
            SampleBudget::Count(c) => samples >= c,
            SampleBudget::Time(d) => samples > 0 && start.elapsed() >= d,
        };
        if done {
            break;
        }
        samples += 1;
        let w = simplex_sample(&mut rng, spec.relation.m());
        let in_box = w.iter().zip(&bounds).all(|(&x, &(lo, hi))| x >= lo && x <= hi);
        if !in_box || !spec.predicate.admits(&w, tau) {
            continue;
        }
        admissible += 1;
        let err = position_error(spec, &w, tau).objective(spec.objective);
        if best.as_ref().is_none_or(|(e, _)| err < *e) {
            best = Some((err, w));
        }
    }
    Ok(match best {
        Some((error, w)) => SampleResult {
            weights: Some(WeightVector::new(w)?),
            error,
            samples,
            admissible,
        },
        None => SampleResult {
            weights: None,
            error: f64::INFINITY,
            samples,
            admissible,
        },
    })
}

/// Report for a baseline's weights, with the error evaluated exactly.
pub fn baseline_report(spec: &ProblemSpec, method: &str, w: &WeightVector) -> ExplanationReport {
    ExplanationReport::for_weights(spec, method, w)
}
