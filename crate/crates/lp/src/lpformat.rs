//! CPLEX LP text export, for inspecting models with external tools.

use std::fmt::Write;

use crate::expr::LinearExpr;
use crate::program::{Program, Sense, VarKind};

fn sanitize(name: &str, fallback: usize) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "_.[]".contains(c) { c } else { '_' })
        .collect();
    match cleaned.chars().next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => cleaned,
        _ => format!("v{fallback}_{cleaned}"),
    }
}

fn num(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

fn write_expr(out: &mut String, expr: &LinearExpr, names: &[String]) {
    if expr.terms().is_empty() {
        out.push_str("0 ");
        out.push_str(&names.first().cloned().unwrap_or_else(|| "dummy".into()));
        return;
    }
    for (i, &(v, c)) in expr.terms().iter().enumerate() {
        let coef = num(c.abs());
        let name = &names[v.0];
        let _ = match (i, c < 0.0) {
            (0, false) => write!(out, "{coef} {name}"),
            (0, true) => write!(out, "-{coef} {name}"),
            (_, false) => write!(out, " + {coef} {name}"),
            (_, true) => write!(out, " - {coef} {name}"),
        };
    }
}

pub fn to_lp_format(program: &Program) -> String {
    let names: Vec<String> = program
        .vars()
        .iter()
        .enumerate()
        .map(|(i, v)| sanitize(&v.name, i))
        .collect();
    let mut out = String::from("\\ rankfit model\nMinimize\n obj: ");
    write_expr(&mut out, program.objective(), &names);
    if program.objective().constant_term() != 0.0 {
        let _ = write!(out, " + {}", num(program.objective().constant_term()));
    }
    out.push_str("\nSubject To\n");
    for (i, c) in program.constraints().iter().enumerate() {
        let _ = write!(out, " {}: ", sanitize(&c.name, i));
        write_expr(&mut out, &c.expr, &names);
        let op = match c.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {op} {}", num(c.rhs));
    }
    out.push_str("Bounds\n");
    for (v, name) in program.vars().iter().zip(&names) {
        if v.kind == VarKind::Binary {
            continue;
        }
        let _ = writeln!(out, " {} <= {name} <= {}", num(v.lower), num(v.upper));
    }
    let bins: Vec<&String> = program
        .vars()
        .iter()
        .zip(&names)
        .filter(|(v, _)| v.kind == VarKind::Binary)
        .map(|(_, n)| n)
        .collect();
    if !bins.is_empty() {
        out.push_str("Binaries\n");
        for n in bins {
            let _ = writeln!(out, " {n}");
        }
    }
    out.push_str("End\n");
    out
}
