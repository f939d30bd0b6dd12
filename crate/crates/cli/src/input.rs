//! Reading the input files named on the command line.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rankfit_core::formulate::WeightPredicate;
use rankfit_core::model::{load_relation, parse_importance, GivenRanking, WeightVector};
use rankfit_core::ProblemSpec;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_spec(data: &Path, ranking: &Path, k: usize, dedup: bool) -> Result<ProblemSpec> {
    let relation = load_relation(data, dedup).with_context(|| format!("reading {}", data.display()))?;
    let ranking =
        GivenRanking::parse(&relation, &read(ranking)?).with_context(|| format!("parsing {}", ranking.display()))?;
    Ok(ProblemSpec::new(relation, ranking, k)?)
}

pub fn load_predicate(path: &Path, columns: &[String]) -> Result<WeightPredicate> {
    let text = read(path)?;
    let lines: Vec<&str> = text.lines().collect();
    WeightPredicate::parse(columns, &lines).with_context(|| format!("parsing {}", path.display()))
}

pub fn load_importance(path: &Path) -> Result<HashMap<String, f64>> {
    parse_importance(read(path)?.as_bytes()).with_context(|| format!("parsing {}", path.display()))
}

/// Accepts a JSON array of numbers, a JSON object with a `weights` array (a
/// saved report), or `attribute,weight` lines.
pub fn load_weights(path: &Path, columns: &[String]) -> Result<WeightVector> {
    let text = read(path)?;
    let raw = match serde_json::from_str::<serde_json::Value>(&text) {
        Ok(value) => json_weights(&value).with_context(|| format!("no weight array in {}", path.display()))?,
        Err(_) => csv_weights(&text, columns).with_context(|| format!("parsing {}", path.display()))?,
    };
    if raw.len() != columns.len() {
        bail!("{} weights given for {} attributes", raw.len(), columns.len());
    }
    Ok(WeightVector::new(raw)?)
}

fn json_weights(value: &serde_json::Value) -> Option<Vec<f64>> {
    let array = match value {
        serde_json::Value::Array(a) => a,
        serde_json::Value::Object(o) => o.get("weights")?.as_array()?,
        _ => return None,
    };
    array.iter().map(serde_json::Value::as_f64).collect()
}

fn csv_weights(text: &str, columns: &[String]) -> Result<Vec<f64>> {
    let mut w = vec![None; columns.len()];
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((name, value)) = line.split_once(',') else {
            bail!("line {}: expected `attribute,weight`", i + 1);
        };
        let (name, value) = (name.trim(), value.trim());
        let Ok(x) = value.parse::<f64>() else {
            if i == 0 {
                continue;
            }
            bail!("line {}: non-numeric weight `{value}`", i + 1);
        };
        let j = columns
            .iter()
            .position(|c| c == name)
            .with_context(|| format!("line {}: unknown attribute `{name}`", i + 1))?;
        if w[j].replace(x).is_some() {
            bail!("line {}: attribute `{name}` given twice", i + 1);
        }
    }
    w.into_iter()
        .zip(columns)
        .map(|(x, c)| x.with_context(|| format!("no weight for attribute `{c}`")))
        .collect()
}
