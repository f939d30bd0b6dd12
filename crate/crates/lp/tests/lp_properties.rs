//! Randomized checks of the LP and MILP engines against independent oracles:
//! Lagrangian dual bounds, vertex enumeration in two dimensions and brute
//! force over binary assignments.

use proptest::prelude::*;
use rankfit_lp::{
    check, solve_lp, solve_milp, LinearExpr, MilpHooks, Program, RowGeneration, Sense, SolverConfig, Status, VarId,
};

#[derive(Debug, Clone)]
struct Row {
    coefs: Vec<i32>,
    sense: u8,
    rhs: f64,
}

fn sense_of(s: u8) -> Sense {
    match s % 3 {
        0 => Sense::Le,
        1 => Sense::Ge,
        _ => Sense::Eq,
    }
}

/// Rows built to be satisfied by `point`, so the program is feasible.
fn planted_rows(nvars: usize, max_rows: usize) -> impl Strategy<Value = (Vec<f64>, Vec<Row>, Vec<i32>)> {
    (
        prop::collection::vec(-4i32..=4, nvars),
        prop::collection::vec((prop::collection::vec(-5i32..=5, nvars), 0u8..6, 0i32..4), 0..=max_rows),
        prop::collection::vec(-5i32..=5, nvars),
    )
        .prop_map(|(point, rows, obj)| {
            let point: Vec<f64> = point.into_iter().map(|p| p as f64 * 0.5).collect();
            let rows = rows
                .into_iter()
                .map(|(coefs, s, gap)| {
                    let act: f64 = coefs.iter().zip(&point).map(|(&a, &x)| a as f64 * x).sum();
                    // Equalities are rarer than inequalities.
                    let sense = if s == 5 { 2 } else { s % 2 };
                    let rhs = match sense_of(sense) {
                        Sense::Le => act + gap as f64,
                        Sense::Ge => act - gap as f64,
                        Sense::Eq => act,
                    };
                    Row { coefs, sense, rhs }
                })
                .collect();
            (point, rows, obj)
        })
}

fn build(nvars: usize, rows: &[Row], obj: &[i32], lo: f64, hi: f64) -> (Program, Vec<VarId>) {
    let mut p = Program::new();
    let xs: Vec<VarId> = (0..nvars)
        .map(|i| p.add_continuous(format!("x{i}"), lo, hi).unwrap())
        .collect();
    for (i, r) in rows.iter().enumerate() {
        let e = LinearExpr::from_terms(xs.iter().zip(&r.coefs).map(|(&x, &a)| (x, a as f64)), 0.0);
        p.add_constraint(format!("r{i}"), e, sense_of(r.sense), r.rhs).unwrap();
    }
    p.set_objective(LinearExpr::from_terms(xs.iter().zip(obj).map(|(&x, &c)| (x, c as f64)), 0.0))
        .unwrap();
    (p, xs)
}

/// Minimum of a 2-variable LP over a box by enumerating all vertices.
fn vertex_oracle(rows: &[(f64, f64, Sense, f64)], obj: (f64, f64), lo: f64, hi: f64) -> Option<f64> {
    let mut lines: Vec<(f64, f64, f64)> = rows.iter().map(|&(a, b, _, r)| (a, b, r)).collect();
    lines.extend([(1.0, 0.0, lo), (1.0, 0.0, hi), (0.0, 1.0, lo), (0.0, 1.0, hi)]);
    let feasible = |x: f64, y: f64| {
        let eps = 1e-7;
        x >= lo - eps
            && x <= hi + eps
            && y >= lo - eps
            && y <= hi + eps
            && rows.iter().all(|&(a, b, s, r)| {
                let v = a * x + b * y;
                match s {
                    Sense::Le => v <= r + eps,
                    Sense::Ge => v >= r - eps,
                    Sense::Eq => (v - r).abs() <= eps,
                }
            })
    };
    let mut best: Option<f64> = None;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let (a1, b1, r1) = lines[i];
            let (a2, b2, r2) = lines[j];
            let det = a1 * b2 - a2 * b1;
            if det.abs() < 1e-12 {
                continue;
            }
            let x = (r1 * b2 - r2 * b1) / det;
            let y = (a1 * r2 - a2 * r1) / det;
            if feasible(x, y) {
                let v = obj.0 * x + obj.1 * y;
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lp_optimum_is_feasible_and_matches_dual_bound(
        (point, rows, obj) in (1usize..=7).prop_flat_map(|n| planted_rows(n, 10))
    ) {
        let (p, _) = build(point.len(), &rows, &obj, -5.0, 5.0);
        let sol = solve_lp(&p, &SolverConfig::default()).unwrap();
        prop_assert_eq!(sol.status, Status::Optimal);
        let obj_value = sol.objective.unwrap();
        prop_assert!(check::max_violation(&p, &sol.values) <= 1e-9);
        let dual = check::lagrangian_bound(&p, sol.duals.as_ref().unwrap());
        prop_assert!((obj_value - dual).abs() <= 1e-6, "primal {} dual {}", obj_value, dual);
        let planted = p.objective().eval(&point);
        prop_assert!(obj_value <= planted + 1e-9);
    }

    #[test]
    fn lp_matches_vertex_enumeration_in_two_dimensions(
        rows in prop::collection::vec((-5i32..=5, -5i32..=5, 0u8..2, -10i32..=10), 0..8),
        c in (-5i32..=5, -5i32..=5),
    ) {
        let rows: Vec<(f64, f64, Sense, f64)> = rows
            .into_iter()
            .map(|(a, b, s, r)| (a as f64, b as f64, sense_of(s), r as f64))
            .collect();
        let as_rows: Vec<Row> = rows
            .iter()
            .map(|&(a, b, s, r)| Row {
                coefs: vec![a as i32, b as i32],
                sense: if s == Sense::Le { 0 } else { 1 },
                rhs: r,
            })
            .collect();
        let (p, _) = build(2, &as_rows, &[c.0, c.1], -3.0, 3.0);
        let sol = solve_lp(&p, &SolverConfig::default()).unwrap();
        match vertex_oracle(&rows, (c.0 as f64, c.1 as f64), -3.0, 3.0) {
            Some(best) => {
                prop_assert_eq!(sol.status, Status::Optimal);
                prop_assert!((sol.objective.unwrap() - best).abs() <= 1e-7);
            }
            None => prop_assert_eq!(sol.status, Status::Infeasible),
        }
    }

    #[test]
    fn lazy_rows_do_not_change_the_optimum(
        (point, rows, obj) in (1usize..=5).prop_flat_map(|n| planted_rows(n, 30))
    ) {
        let (p, _) = build(point.len(), &rows, &obj, -5.0, 5.0);
        let mut eager = SolverConfig::default();
        eager.row_generation = RowGeneration::Never;
        let mut lazy = SolverConfig::default();
        lazy.row_generation = RowGeneration::Always;
        let a = solve_lp(&p, &eager).unwrap();
        let b = solve_lp(&p, &lazy).unwrap();
        prop_assert_eq!(a.status, Status::Optimal);
        prop_assert_eq!(b.status, Status::Optimal);
        prop_assert!((a.objective.unwrap() - b.objective.unwrap()).abs() <= 1e-7);
        let dual = check::lagrangian_bound(&p, b.duals.as_ref().unwrap());
        prop_assert!((b.objective.unwrap() - dual).abs() <= 1e-6);
    }

    #[test]
    fn pure_binary_optimum_matches_enumeration(
        n in 1usize..=12,
        seed_rows in prop::collection::vec((prop::collection::vec(-4i32..=4, 12), 0u8..3, -6i32..=8), 0..6),
        obj in prop::collection::vec(-6i32..=6, 12),
    ) {
        let mut p = Program::new();
        let xs: Vec<VarId> = (0..n).map(|i| p.add_binary(format!("b{i}"))).collect();
        let mut rows = Vec::new();
        for (coefs, s, rhs) in &seed_rows {
            let coefs = &coefs[..n];
            let sense = sense_of(*s);
            let e = LinearExpr::from_terms(xs.iter().zip(coefs).map(|(&x, &a)| (x, a as f64)), 0.0);
            p.add_constraint("r", e, sense, *rhs as f64).unwrap();
            rows.push((coefs.to_vec(), sense, *rhs as f64));
        }
        let obj = &obj[..n];
        p.set_objective(LinearExpr::from_terms(xs.iter().zip(obj).map(|(&x, &c)| (x, c as f64)), 0.0)).unwrap();

        let mut best: Option<f64> = None;
        for mask in 0u32..(1 << n) {
            let v: Vec<f64> = (0..n).map(|i| ((mask >> i) & 1) as f64).collect();
            let ok = rows.iter().all(|(c, s, r)| {
                let a: f64 = c.iter().zip(&v).map(|(&c, &x)| c as f64 * x).sum();
                match s {
                    Sense::Le => a <= *r,
                    Sense::Ge => a >= *r,
                    Sense::Eq => a == *r,
                }
            });
            if ok {
                let o: f64 = obj.iter().zip(&v).map(|(&c, &x)| c as f64 * x).sum();
                best = Some(best.map_or(o, |b: f64| b.min(o)));
            }
        }
        let sol = solve_milp(&p, &SolverConfig::default(), &MilpHooks::default()).unwrap();
        match best {
            Some(b) => {
                prop_assert_eq!(sol.status, Status::Optimal);
                prop_assert!((sol.objective.unwrap() - b).abs() <= 1e-9);
                prop_assert!(check::is_feasible(&p, &sol.values, 1e-9, 0.0));
            }
            None => prop_assert_eq!(sol.status, Status::Infeasible),
        }
    }

    #[test]
    fn mixed_optimum_matches_enumeration_with_vertex_oracle(
        nb in 1usize..=6,
        rows in prop::collection::vec((-4i32..=4, -4i32..=4, prop::collection::vec(-4i32..=4, 6), 0u8..2, -6i32..=6), 1..6),
        c in (-4i32..=4, -4i32..=4),
        cb in prop::collection::vec(-4i32..=4, 6),
    ) {
        let mut p = Program::new();
        let x = p.add_continuous("x", -2.0, 2.0).unwrap();
        let y = p.add_continuous("y", -2.0, 2.0).unwrap();
        let bs: Vec<VarId> = (0..nb).map(|i| p.add_binary(format!("b{i}"))).collect();
        for (a, b, coefs, s, r) in &rows {
            let mut e = LinearExpr::from_terms([(x, *a as f64), (y, *b as f64)], 0.0);
            for (&v, &k) in bs.iter().zip(coefs) {
                e.add_term(v, k as f64);
            }
            p.add_constraint("r", e, sense_of(*s), *r as f64).unwrap();
        }
        let mut o = LinearExpr::from_terms([(x, c.0 as f64), (y, c.1 as f64)], 0.0);
        for (&v, &k) in bs.iter().zip(&cb) {
            o.add_term(v, k as f64);
        }
        p.set_objective(o).unwrap();

        let mut best: Option<f64> = None;
        for mask in 0u32..(1 << nb) {
            let bv: Vec<f64> = (0..nb).map(|i| ((mask >> i) & 1) as f64).collect();
            let reduced: Vec<(f64, f64, Sense, f64)> = rows
                .iter()
                .map(|(a, b, coefs, s, r)| {
                    let shift: f64 = coefs.iter().zip(&bv).map(|(&k, &v)| k as f64 * v).sum();
                    (*a as f64, *b as f64, sense_of(*s), *r as f64 - shift)
                })
                .collect();
            let base: f64 = cb.iter().zip(&bv).map(|(&k, &v)| k as f64 * v).sum();
            if let Some(v) = vertex_oracle(&reduced, (c.0 as f64, c.1 as f64), -2.0, 2.0) {
                let total = v + base;
                best = Some(best.map_or(total, |b: f64| b.min(total)));
            }
        }
        let sol = solve_milp(&p, &SolverConfig::default(), &MilpHooks::default()).unwrap();
        match best {
            Some(b) => {
                prop_assert_eq!(sol.status, Status::Optimal);
                prop_assert!((sol.objective.unwrap() - b).abs() <= 1e-7);
                prop_assert!(check::is_feasible(&p, &sol.values, 1e-9, 0.0));
            }
            None => prop_assert_eq!(sol.status, Status::Infeasible),
        }
    }

    #[test]
    fn milp_is_deterministic(
        n in 2usize..=10,
        coefs in prop::collection::vec(1i32..=9, 10),
        obj in prop::collection::vec(-9i32..=-1, 10),
    ) {
        let mut p = Program::new();
        let xs: Vec<VarId> = (0..n).map(|i| p.add_binary(format!("b{i}"))).collect();
        let cap: f64 = coefs[..n].iter().map(|&c| c as f64).sum::<f64>() / 2.0 + 0.5;
        p.add_constraint("cap", LinearExpr::from_terms(xs.iter().zip(&coefs).map(|(&x, &c)| (x, c as f64)), 0.0), Sense::Le, cap).unwrap();
        p.set_objective(LinearExpr::from_terms(xs.iter().zip(&obj).map(|(&x, &c)| (x, c as f64)), 0.0)).unwrap();
        let a = solve_milp(&p, &SolverConfig::default(), &MilpHooks::default()).unwrap();
        let b = solve_milp(&p, &SolverConfig::default(), &MilpHooks::default()).unwrap();
        prop_assert_eq!(a.values, b.values);
        prop_assert_eq!(a.nodes, b.nodes);
    }
}
