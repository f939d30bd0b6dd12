use std::collections::HashMap;

use rankfit_core::approx::{local_explain, sliding_window_solve, LocalSize};
use rankfit_core::baselines::{ordinal_regression_weights, sampling_search, SampleBudget};
use rankfit_core::evalverify::{
    metrics, position_error, solve_opt, solve_sat, solve_with_escalation, verify, ExplanationReport, Mode,
    ReportStatus, SolveOptions,
};
use rankfit_core::formulate::{build_opt, build_sat, compute_dominance, EpsilonConfig, WeightPredicate};
use rankfit_core::model::{
    build_unsat_ranking, generate_uniform, ranking_from_scores, score, scores, sum_ranking, GivenRanking,
    NormMode, NormalizationStats, RankRelation, Relation, TupleRecord, WeightVector,
};
use rankfit_core::{CoreError, ObjectiveKind, ProblemSpec};
use rankfit_lp::Sense;

fn example() -> Relation {
    Relation::from_csv_reader("id,A1,A2,A3\nr,3,2,8\ns,4,1,15\nt,1,1,14\n".as_bytes(), false).unwrap()
}

fn example_spec(k: usize) -> ProblemSpec {
    ProblemSpec::new(example(), GivenRanking::strict(vec![0, 1, 2]).unwrap(), k).unwrap()
}

fn w(v: &[f64]) -> WeightVector {
    WeightVector::new(v.to_vec()).unwrap()
}

#[test]
fn example_relation_loads() {
    let r = example();
    assert_eq!((r.n(), r.m()), (3, 3));
    assert_eq!(r.attrs(1), &[4.0, 1.0, 15.0]);
}

#[test]
fn empty_relation_is_rejected() {
    let err = Relation::from_csv_reader("id,A1\n".as_bytes(), false).unwrap_err();
    assert!(matches!(err, CoreError::EmptyRelation));
}

#[test]
fn dedup_drops_identical_rows() {
    let text = "id,A1,A2\na,1,2\nb,1,2\nc,0,3\n";
    assert_eq!(Relation::from_csv_reader(text.as_bytes(), false).unwrap().n(), 3);
    assert_eq!(Relation::from_csv_reader(text.as_bytes(), true).unwrap().n(), 2);
}

#[test]
fn ranks_follow_the_tie_definition() {
    let rel = Relation::from_csv_reader("id,A\nr1,4\nr2,3\nr3,2\nr4,1\n".as_bytes(), false).unwrap();
    let pi = GivenRanking::parse(&rel, "r1\n> r2\n= r3\n> r4\n").unwrap();
    assert_eq!(pi.ranks(), &[1, 2, 2, 4]);
    let one = Relation::from_csv_reader("id,A\nx,1\n".as_bytes(), false).unwrap();
    assert_eq!(GivenRanking::parse(&one, "x").unwrap().rank(0), 1);
    let tied = GivenRanking::new(3, vec![0, 1, 2], vec![RankRelation::Equal; 2]).unwrap();
    assert_eq!(tied.ranks(), &[1, 1, 1]);
    assert!(pi.rank_of(&rel, "nope").is_err());
}

#[test]
fn scores_are_weighted_sums() {
    let t = TupleRecord {
        id: "r".into(),
        attrs: vec![3.0, 2.0, 8.0],
    };
    assert_eq!(score(&w(&[1.0, 0.0, 0.0]), &t).unwrap(), 3.0);
    let third = 1.0 / 3.0;
    assert!((score(&w(&[third, third, third]), &t).unwrap() - 13.0 / 3.0).abs() < 1e-12);
    assert!(score(&w(&[0.5, 0.5]), &t).is_err());
    // s − r = w1 − w2 + 7 w3
    let rel = example();
    for v in [[0.2, 0.7, 0.1], [0.5, 0.25, 0.25], [0.0, 1.0, 0.0]] {
        let sc = scores(&rel, &v);
        assert!((sc[1] - sc[0] - (v[0] - v[1] + 7.0 * v[2])).abs() < 1e-12);
    }
}

#[test]
fn scored_ranks_share_ties() {
    let rel = Relation::from_csv_reader("id,A\na,9\nb,6\nc,6\nd,5\n".as_bytes(), false).unwrap();
    assert_eq!(ranking_from_scores(&rel, &w(&[1.0]), 0.0).ranks, vec![1, 2, 2, 4]);
    let flat = Relation::from_csv_reader("id,A\na,1\nb,1\nc,1\n".as_bytes(), false).unwrap();
    assert_eq!(ranking_from_scores(&flat, &w(&[1.0]), 0.0).ranks, vec![1, 1, 1]);
    let tau = 1e-6;
    let near = Relation::new(
        vec!["A".into()],
        vec![
            TupleRecord {
                id: "a".into(),
                attrs: vec![1.0],
            },
            TupleRecord {
                id: "b".into(),
                attrs: vec![1.0 + tau / 2.0],
            },
        ],
    )
    .unwrap();
    assert_eq!(ranking_from_scores(&near, &w(&[1.0]), tau).ranks, vec![1, 1]);
}

#[test]
fn zscore_transform_multiplies_by_std() {
    let rel = generate_uniform(30, 3, 8).unwrap();
    let stats = NormalizationStats::compute(&rel);
    let v = w(&[0.2, 0.3, 0.5]);
    let t = rankfit_core::model::transform_weights(&v, &stats, NormMode::ZScore).unwrap();
    let raw: Vec<f64> = v.as_slice().iter().zip(&stats.std).map(|(a, s)| a * s).collect();
    let sum: f64 = raw.iter().sum();
    for (x, y) in t.as_slice().iter().zip(&raw) {
        assert!((x - y / sum).abs() < 1e-12);
    }
}

#[test]
fn transformed_weights_reproduce_raw_ranking() {
    let rel = generate_uniform(20, 3, 17).unwrap();
    let stats = NormalizationStats::compute(&rel);
    let v = w(&[0.6, 0.1, 0.3]);
    for mode in [NormMode::MinMax, NormMode::Mean, NormMode::ZScore] {
        let norm = stats.normalize(&rel, mode).unwrap();
        let t = rankfit_core::model::transform_weights(&v, &stats, mode).unwrap();
        let a = ranking_from_scores(&rel, &v, 0.0);
        let b = ranking_from_scores(&norm, &t, 1e-12);
        assert_eq!(a.ranks, b.ranks, "{mode}");
    }
}

#[test]
fn uniform_generator_is_deterministic_and_centered() {
    assert_eq!(generate_uniform(5, 2, 42).unwrap(), generate_uniform(5, 2, 42).unwrap());
    let rel = generate_uniform(1000, 3, 1).unwrap();
    for j in 0..3 {
        let mean: f64 = (0..1000).map(|i| rel.attrs(i)[j]).sum::<f64>() / 1000.0;
        assert!((mean - 0.5).abs() < 0.05);
    }
    assert_eq!(rel.dedup().n(), 1000);
}

#[test]
fn unsat_ranking_moves_second_block_to_front() {
    let rel = generate_uniform(12, 10, 3).unwrap();
    let base = sum_ranking(&rel).order().to_vec();
    let pi = build_unsat_ranking(&rel).unwrap();
    let expected: Vec<usize> = base[5..10].iter().chain(&base[..5]).chain(&base[10..]).copied().collect();
    assert_eq!(pi.order(), expected.as_slice());
    assert!(pi.relations().iter().all(|&r| r == RankRelation::Greater));
    let ten = generate_uniform(10, 2, 3).unwrap();
    assert_eq!(build_unsat_ranking(&ten).unwrap().len(), 10);
    assert!(build_unsat_ranking(&generate_uniform(9, 2, 3).unwrap()).is_err());
}

#[test]
fn unsat_ranking_on_seed_42_has_positive_optimum() {
    let rel = generate_uniform(30, 2, 42).unwrap();
    let spec = ProblemSpec::new(rel.clone(), build_unsat_ranking(&rel).unwrap(), 5).unwrap();
    let r = solve_opt(&spec, &SolveOptions::default()).unwrap();
    assert_eq!(r.status, ReportStatus::Optimal);
    assert!(r.objective.unwrap() > 0.0);
}

#[test]
fn dominance_on_example_tuples() {
    let dom = compute_dominance(&example());
    assert!(dom.dominates(1, 2));
    assert!(!dom.dominates(0, 1) && !dom.dominates(1, 0));
}

#[test]
fn sat_program_for_example() {
    let spec = example_spec(2);
    let (p, layout) = build_sat(&spec).unwrap();
    assert_eq!(layout.ranking_rows, 2);
    assert_eq!(p.num_binaries(), 0);
    let ws: Vec<usize> = layout.weights.iter().map(|v| v.index()).collect();
    let row = |name: &str| p.constraints().iter().find(|c| c.name == name).unwrap();
    // r − s ≥ eps1, i.e. −w1 + w2 − 7 w3 ≥ eps1
    let chain = row("chain0");
    assert_eq!(chain.sense, Sense::Ge);
    assert_eq!(chain.rhs, spec.eps.eps1);
    let coefs: Vec<f64> = ws.iter().map(|&j| chain.expr.coefficient(layout.weights[j])).collect();
    assert_eq!(coefs, vec![-1.0, 1.0, -7.0]);
    // s − t ≥ 0, i.e. 3 w1 + w3 ≥ 0
    let bound = row("bound2");
    assert_eq!((bound.sense, bound.rhs), (Sense::Ge, 0.0));
    let coefs: Vec<f64> = ws.iter().map(|&j| bound.expr.coefficient(layout.weights[j])).collect();
    assert_eq!(coefs, vec![3.0, 0.0, 1.0]);
}

#[test]
fn single_tuple_is_always_satisfiable() {
    let rel = Relation::from_csv_reader("id,A1,A2\nx,1,2\n".as_bytes(), false).unwrap();
    let spec = ProblemSpec::new(rel, GivenRanking::strict(vec![0]).unwrap(), 1).unwrap();
    assert_eq!(solve_sat(&spec, &SolveOptions::default()).unwrap().status, ReportStatus::Satisfiable);
    let (p, layout) = build_opt(&spec, true).unwrap();
    assert_eq!(layout.num_binaries(), 0);
    assert_eq!(p.num_binaries(), 0);
    assert_eq!(solve_opt(&spec, &SolveOptions::default()).unwrap().objective, Some(0.0));
}

#[test]
fn sum_order_admits_equal_weights() {
    let rel = generate_uniform(40, 4, 6).unwrap();
    let spec = ProblemSpec::new(rel.clone(), sum_ranking(&rel), 5)
        .unwrap()
        .with_eps(EpsilonConfig::default().with_eps1(1e-6));
    let (p, _) = build_sat(&spec).unwrap();
    let x = vec![0.25; 4];
    assert!(rankfit_lp::check::max_violation(&p, &x) <= 1e-9);
}

#[test]
fn example_opt_pruned_error_terms() {
    let spec = example_spec(3);
    let (_, layout) = build_opt(&spec, true).unwrap();
    // t can never be above s; r and s may still swap.
    assert_eq!(layout.resolved(2, 1), Some(false));
    assert!(layout.indicator(0, 1).is_some());
    assert!(layout.indicator(1, 0).is_some());
    assert_eq!(layout.resolved_below[1], 1);
    let r = solve_opt(&spec, &SolveOptions::default()).unwrap();
    assert_eq!(r.objective, Some(0.0));
    assert!(r.verified);
}

#[test]
fn pruned_and_full_programs_agree_on_fifteen_tuples() {
    let rel = generate_uniform(15, 3, 23).unwrap();
    let spec = ProblemSpec::new(rel.clone(), build_unsat_ranking(&rel).unwrap(), 3).unwrap();
    let a = solve_opt(&spec, &SolveOptions::default()).unwrap();
    let b = solve_opt(
        &spec,
        &SolveOptions {
            prune: false,
            ..SolveOptions::default()
        },
    )
    .unwrap();
    assert_eq!(a.objective, b.objective);
}

#[test]
fn predicate_examples() {
    let cols: Vec<String> = ["PTS", "AST", "BLK"].iter().map(|s| s.to_string()).collect();
    let p = WeightPredicate::parse(&cols, &["PTS <= 0.1", "A1 >= 0"].map(|s| s.replace("A1", "AST"))).unwrap();
    assert_eq!(p.rows()[0].coefs, vec![1.0, 0.0, 0.0]);
    assert_eq!(p.rows()[0].rhs, 0.1);
    let rel = WeightPredicate::parse(&cols, &["BLK <= PTS + AST"]).unwrap();
    assert_eq!(rel.rows()[0].coefs, vec![-1.0, -1.0, 1.0]);
    assert!(WeightPredicate::parse(&cols, &["PTS < 0.1"]).is_err());
    assert!(WeightPredicate::parse(&cols, &["REB <= 0.1"]).is_err());
}

#[test]
fn predicate_limits_the_weights() {
    let rel = generate_uniform(20, 3, 2).unwrap();
    let pred = WeightPredicate::parse(rel.columns(), &["A1 <= 0.1"]).unwrap();
    let spec = ProblemSpec::new(rel.clone(), sum_ranking(&rel), 4).unwrap();
    let free = solve_opt(&spec, &SolveOptions::default()).unwrap();
    let held = solve_opt(&spec.clone().with_predicate(pred).unwrap(), &SolveOptions::default()).unwrap();
    assert!(held.weights.as_ref().unwrap()[0] <= 0.1 + 1e-9);
    assert!(held.objective.unwrap() >= free.objective.unwrap());
    assert!(held.verified);
}

#[test]
fn position_error_of_example_weights() {
    let spec = example_spec(3);
    let e = position_error(&spec, &[0.2, 0.7, 0.1], 0.0);
    assert_eq!(e.total, 2.0);
    assert_eq!(
        e.per_tuple.iter().map(|t| t.achieved_rank).collect::<Vec<_>>(),
        vec![2, 1, 3]
    );
    let m = metrics(&spec.relation, &spec.ranking, spec.top_k(), &[0.2, 0.7, 0.1], 0.0);
    assert_eq!((m.inversions, m.max_position_error), (1, 1));
}

#[test]
fn importance_scales_a_tuple_error() {
    let mut u = HashMap::new();
    u.insert("s".to_string(), 2.0);
    let spec = example_spec(3).with_importance(&u).unwrap();
    let e = position_error(&spec, &[0.2, 0.7, 0.1], 0.0);
    assert_eq!(e.per_tuple[1].error, 2.0);
    assert_eq!(e.total, 3.0);
}

#[test]
fn max_objective_counts_the_worst_tuple() {
    let rel = generate_uniform(20, 2, 4).unwrap();
    let spec = ProblemSpec::new(rel.clone(), build_unsat_ranking(&rel).unwrap(), 5)
        .unwrap()
        .with_objective(ObjectiveKind::Max);
    let r = solve_opt(&spec, &SolveOptions::default()).unwrap();
    assert!(r.verified);
    assert_eq!(r.objective, r.max_error);
    let sum = solve_opt(&spec.clone().with_objective(ObjectiveKind::Sum), &SolveOptions::default()).unwrap();
    assert!(r.objective.unwrap() <= sum.objective.unwrap());
}

#[test]
fn perturbed_certificate_is_rejected() {
    // Tight instance: the top pair is separated only for w1 close to 0.5.
    let rel = Relation::from_csv_reader("id,A1,A2\na,1,0\nb,0,1\nc,0.2,0.2\n".as_bytes(), false).unwrap();
    let pred = WeightPredicate::parse(rel.columns(), &["A1 <= 0.5001", "A1 >= 0.5"]).unwrap();
    let spec = ProblemSpec::new(rel, GivenRanking::strict(vec![0, 1, 2]).unwrap(), 2)
        .unwrap()
        .with_predicate(pred)
        .unwrap();
    let mut r = solve_sat(&spec, &SolveOptions::default()).unwrap();
    assert!(r.verified);
    let mut bad = r.weights.clone().unwrap();
    bad[1] += 1e-2;
    r.weights = Some(WeightVector::project(&bad).as_slice().to_vec());
    assert!(!verify(&r, &spec));
}

#[test]
fn exact_reproduction_with_zero_objective_verifies() {
    let spec = example_spec(3);
    let sat = solve_sat(&spec, &SolveOptions::default()).unwrap();
    let mut report = ExplanationReport::new(&spec, "check", ReportStatus::Optimal);
    report.attach_weights(&spec, sat.weights.unwrap());
    report.objective = Some(0.0);
    assert!(verify(&report, &spec));
}

#[test]
fn well_separated_instance_needs_no_escalation() {
    let spec = example_spec(3);
    for mode in [Mode::Sat, Mode::Opt] {
        let r = solve_with_escalation(&spec, mode, &SolveOptions::default()).unwrap();
        assert!(r.verified);
        assert_eq!(r.escalations, 0);
    }
}

#[test]
fn unsatisfiable_instance_is_returned_without_escalation() {
    let rel = generate_uniform(20, 2, 5).unwrap();
    let spec = ProblemSpec::new(rel.clone(), build_unsat_ranking(&rel).unwrap(), 5).unwrap();
    let r = solve_with_escalation(&spec, Mode::Sat, &SolveOptions::default()).unwrap();
    assert_eq!(r.status, ReportStatus::Unsatisfiable);
    assert_eq!(r.escalations, 0);
    assert!(!r.verified);
}

#[test]
fn escalation_rejects_a_gap_below_the_floor() {
    let spec = example_spec(3).with_eps(EpsilonConfig::default().with_eps1(1e-9));
    assert!(solve_with_escalation(&spec, Mode::Sat, &SolveOptions::default()).is_err());
}

#[test]
fn ordinal_regression_penalizes_unsat_instances() {
    let rel = generate_uniform(30, 3, 12).unwrap();
    let spec = ProblemSpec::new(rel.clone(), build_unsat_ranking(&rel).unwrap(), 5).unwrap();
    assert!(ordinal_regression_weights(&spec).unwrap().penalty > 0.0);
}

#[test]
fn sampling_finds_a_wide_feasible_region() {
    let spec = example_spec(3);
    let r = sampling_search(&spec, SampleBudget::Count(10_000), 9).unwrap();
    assert_eq!(r.error, 0.0);
    assert_eq!(r.samples, 10_000);
}

#[test]
fn single_window_equals_global_optimum() {
    let rel = generate_uniform(10, 2, 31).unwrap();
    let spec = ProblemSpec::new(rel.clone(), build_unsat_ranking(&rel).unwrap(), 10).unwrap();
    let global = solve_opt(&spec, &SolveOptions::default()).unwrap();
    let res = sliding_window_solve(&spec, 10, &SolveOptions::default()).unwrap();
    assert_eq!(res.windows.len(), 1);
    assert_eq!(res.windows[0].report.objective, global.objective);
}

#[test]
fn windows_over_a_planted_ranking_have_zero_error() {
    let rel = generate_uniform(24, 3, 13).unwrap();
    let sc = scores(&rel, &[0.5, 0.3, 0.2]);
    let spec = ProblemSpec::new(rel, GivenRanking::from_scores(&sc, 0.0).unwrap(), 6)
        .unwrap()
        .with_eps(EpsilonConfig::default().with_eps1(1e-7));
    let res = sliding_window_solve(&spec, 6, &SolveOptions::default()).unwrap();
    assert_eq!(res.windows.len(), 7);
    for win in &res.windows {
        assert_eq!(win.report.objective, Some(0.0), "window at {}", win.start);
    }
    let s: f64 = res.seed.as_slice().iter().sum();
    assert!((s - 1.0).abs() < 1e-9);
}

#[test]
fn local_explain_keeps_a_clean_problem() {
    let spec = example_spec(3);
    let res = local_explain(&spec, 0.8, &|r: &ExplanationReport| r.status != ReportStatus::Optimal, &SolveOptions::default())
        .unwrap();
    assert!(res.success);
    assert_eq!(res.size, LocalSize { k: 3, lower: 0 });
    assert_eq!(res.attempts.len(), 1);
}

#[test]
fn local_explain_shrinks_k_until_error_vanishes() {
    // The top five are reproducible; the block after them is not.
    let rel = generate_uniform(30, 3, 40).unwrap();
    let sc = scores(&rel, &[0.2, 0.5, 0.3]);
    let planted = GivenRanking::from_scores(&sc, 0.0).unwrap();
    let mut order = planted.order().to_vec();
    order[5..].reverse();
    let spec = ProblemSpec::new(rel, GivenRanking::strict(order).unwrap(), 10)
        .unwrap()
        .with_eps(EpsilonConfig::default().with_eps1(1e-7));
    let exception = |r: &ExplanationReport| r.objective.is_none_or(|v| v > 0.0);
    let res = local_explain(&spec, 0.8, &exception, &SolveOptions::default()).unwrap();
    assert!(res.success);
    // With k' = 5 and nothing below, only planted tuples remain.
    assert!((5..=8).contains(&res.size.k), "{:?}", res.size);
    assert_eq!(res.report.objective, Some(0.0));
    let first_ok = res.attempts.iter().position(|(_, failed)| !failed).unwrap();
    assert_eq!(res.attempts[first_ok].0, LocalSize { k: res.size.k, lower: 0 });
    assert!(res.attempts[..first_ok].iter().all(|(_, failed)| *failed));
}
