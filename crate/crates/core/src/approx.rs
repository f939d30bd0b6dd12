//! Heuristics for instances too large to optimize outright: optimization
//! restricted to a small cell around a seed vector, seeds from sliding
//! windows, and local explanations over shrinking prefixes.

use crate::baselines::{linear_regression_weights, ordinal_regression_weights, sampling_search, SampleBudget};
use crate::error::{invalid, Result};
use crate::evalverify::{position_error, solve_opt, verify, ExplanationReport, ReportStatus, SolveOptions};
use crate::model::WeightVector;
use crate::problem::ProblemSpec;

/// How the center of the search cell is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum SeedStrategy {
    Sampling { budget: SampleBudget, seed: u64 },
    SlidingWindow { window: usize },
    LinearRegression,
    OrdinalRegression,
    Explicit(WeightVector),
}

impl SeedStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Sampling { .. } => "sampling",
            Self::SlidingWindow { .. } => "window",
            Self::LinearRegression => "lr",
            Self::OrdinalRegression => "ordreg",
            Self::Explicit(_) => "explicit",
        }
    }
}

/// Computes the seed vector of a strategy.
pub fn seed_weights(spec: &ProblemSpec, strategy: &SeedStrategy, opts: &SolveOptions) -> Result<WeightVector> {
    match strategy {
        SeedStrategy::Sampling { budget, seed } => sampling_search(spec, *budget, *seed)?
            .weights
            .ok_or_else(|| invalid("no sampled weight vector satisfied the weight constraints")),
        SeedStrategy::SlidingWindow { window } => Ok(sliding_window_solve(spec, *window, opts)?.seed),
        SeedStrategy::LinearRegression => Ok(linear_regression_weights(&spec.relation, &spec.ranking)?.projected),
        SeedStrategy::OrdinalRegression => Ok(ordinal_regression_weights(spec)?.weights),
        SeedStrategy::Explicit(w) => {
            if w.len() != spec.relation.m() {
                return Err(crate::CoreError::DimensionMismatch {
                    expected: spec.relation.m(),
                    got: w.len(),
                });
            }
            Ok(w.clone())
        }
    }
}

#[derive(Debug, Clone)]
pub struct CellResult {
    pub report: ExplanationReport,
    pub seed: WeightVector,
    pub seed_error: f64,
}

/// Optimizes within the box `seed ± half_width` (intersected with any
/// existing weight bounds). If the seed itself scores better than what the
/// search returned, the seed is reported instead.
pub fn cell_solve(
    spec: &ProblemSpec,
    strategy: &SeedStrategy,
    half_width: f64,
    opts: &SolveOptions,
) -> Result<CellResult> {
    if !(half_width > 0.0) {
        return Err(invalid("cell half-width must be positive"));
    }
    let seed = seed_weights(spec, strategy, opts)?;
    let tau = spec.eps.tau;
    let base = spec.weight_box()?;
    let bounds: Vec<(f64, f64)> = seed
        .as_slice()
        .iter()
        .zip(&base)
        .map(|(&w, &(lo, hi))| ((w - half_width).max(lo), (w + half_width).min(hi)))
        .collect();
    let cell = spec.clone().with_weight_bounds(bounds)?;
    let seed_report = ExplanationReport::for_weights(&cell, "seed", &seed);
    let seed_admissible = seed_report.verified;
    let seed_error = position_error(spec, seed.as_slice(), tau).objective(spec.objective);

    let cell_opts = SolveOptions {
        start: seed_admissible.then(|| seed.as_slice().to_vec()),
        ..opts.clone()
    };
    let mut report = solve_opt(&cell, &cell_opts)?;
    report.method = format!("cell:{}", strategy.name());
    report.notes.push(format!("cell half-width {half_width}"));
    let found = report.error_value().filter(|_| report.has_weights());
    if seed_admissible && found.is_none_or(|e| seed_error < e) {
        let best_bound = report.best_bound;
        let nodes = report.nodes;
        let iterations = report.iterations;
        let mut notes = std::mem::take(&mut report.notes);
        notes.push("the seed scored better than the cell search result".into());
        report = seed_report;
        report.method = format!("cell:{}", strategy.name());
        report.best_bound = best_bound;
        report.nodes = nodes;
        report.iterations = iterations;
        report.notes = notes;
    }
    report.verified = verify(&report, &cell);
    Ok(CellResult {
        report,
        seed,
        seed_error,
    })
}

#[derive(Debug, Clone)]
pub struct WindowReport {
    /// First given-ranking position of the window.
    pub start: usize,
    pub len: usize,
    pub report: ExplanationReport,
}

#[derive(Debug, Clone)]
pub struct WindowResult {
    pub windows: Vec<WindowReport>,
    /// Average of the window optima weighted by `1 / (1 + error)`.
    pub seed: WeightVector,
}

/// Start positions of windows of `len` sliding down `n` positions with
/// stride `ceil(len / 2)`. The last window ends at the bottom.
pub fn window_starts(n: usize, len: usize) -> Vec<usize> {
    if len == 0 || n == 0 {
        return Vec::new();
    }
    let len = len.min(n);
    let stride = len.div_ceil(2);
    let mut starts: Vec<usize> = (0..=n - len).step_by(stride).collect();
    if starts.last() != Some(&(n - len)) {
        starts.push(n - len);
    }
    starts
}

/// Solves the optimization on every window of `window` adjacent tuples of
/// the given ranking and merges the window optima into one seed.
pub fn sliding_window_solve(spec: &ProblemSpec, window: usize, opts: &SolveOptions) -> Result<WindowResult> {
    let n = spec.relation.n();
    if window == 0 || window > spec.k.min(n) {
        return Err(invalid(format!("window must lie in 1..={}", spec.k.min(n))));
    }
    let m = spec.relation.m();
    let mut windows = Vec::new();
    let mut acc = vec![0.0; m];
    let mut total_weight = 0.0;
    for start in window_starts(n, window) {
        let (sub, _) = spec.window(start, window, window)?;
        let mut report = solve_opt(&sub, opts)?;
        report.method = format!("window@{start}");
        if let (Some(w), Some(err)) = (&report.weights, report.error_value()) {
            let weight = 1.0 / (1.0 + err);
            for (a, x) in acc.iter_mut().zip(w) {
                *a += weight * x;
            }
            total_weight += weight;
        }
        windows.push(WindowReport {
            start,
            len: window,
            report,
        });
    }
    if total_weight == 0.0 {
        return Err(invalid("no window produced a weight vector"));
    }
    Ok(WindowResult {
        windows,
        seed: WeightVector::project(&acc),
    })
}

/// Size of a reduced problem: the top `k` tuples plus `lower` further ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalSize {
    pub k: usize,
    pub lower: usize,
}

#[derive(Debug, Clone)]
pub struct LocalResult {
    pub report: ExplanationReport,
    pub size: LocalSize,
    pub success: bool,
    /// Every size tried, in order, with whether it raised an exception.
    pub attempts: Vec<(LocalSize, bool)>,
}

/// Values `ceil(shrink^x · k)` for `x = 1, 2, ...`, without repeats, ending
/// at 1.
pub fn shrinking_ks(k: usize, shrink: f64) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut factor = shrink;
    loop {
        let next = ((factor * k as f64).ceil() as usize).clamp(1, k);
        if next < k && out.last() != Some(&next) {
            out.push(next);
        }
        if next <= 1 || out.len() > k {
            break;
        }
        factor *= shrink;
    }
    out
}

/// Explains smaller and smaller top-k prefixes until `exception` stops
/// firing. For each candidate k, binary-searches the largest number of
/// lower-ranked tuples that can be included.
pub fn local_explain(
    spec: &ProblemSpec,
    shrink: f64,
    exception: &dyn Fn(&ExplanationReport) -> bool,
    opts: &SolveOptions,
) -> Result<LocalResult> {
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(invalid("shrink factor must lie in (0, 1)"));
    }
    let n = spec.relation.n();
    let mut attempts = Vec::new();
    let run = |size: LocalSize, attempts: &mut Vec<(LocalSize, bool)>| -> Result<(ExplanationReport, bool)> {
        let head = spec.ranking.top_k_len(size.k, spec.top_k_mode);
        let (sub, _) = spec.window(0, head + size.lower, size.k)?;
        let report = solve_opt(&sub, opts)?;
        let failed = exception(&report);
        attempts.push((size, failed));
        Ok((report, failed))
    };

    let full = LocalSize {
        k: spec.k,
        lower: n - spec.ranking.top_k_len(spec.k, spec.top_k_mode),
    };
    let (report, failed) = run(full, &mut attempts)?;
    if !failed {
        return Ok(LocalResult {
            report,
            size: full,
            success: true,
            attempts,
        });
    }
    let mut last = report;
    for k in shrinking_ks(spec.k, shrink) {
        let max_lower = n - spec.ranking.top_k_len(k, spec.top_k_mode);
        let base = LocalSize { k, lower: 0 };
        let (report, failed) = run(base, &mut attempts)?;
        if failed {
            last = report;
            continue;
        }
        // Largest passing `lower` lies in [lo, hi).
        let (mut lo, mut hi) = (0, max_lower + 1);
        let mut best = report;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            let (report, failed) = run(LocalSize { k, lower: mid }, &mut attempts)?;
            if failed {
                hi = mid;
            } else {
                lo = mid;
                best = report;
            }
        }
        return Ok(LocalResult {
            report: best,
            size: LocalSize { k, lower: lo },
            success: true,
            attempts,
        });
    }
    last.status = ReportStatus::Failed;
    last.verified = false;
    last.notes.push("no reduced problem avoided the exception".into());
    Ok(LocalResult {
        report: last,
        size: LocalSize { k: 1, lower: 0 },
        success: false,
        attempts,
    })
}
