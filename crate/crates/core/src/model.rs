//! Relations, given rankings, linear scores, normalization and synthetic
//! data.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, CoreError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TupleRecord {
    pub id: String,
    pub attrs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    columns: Vec<String>,
    tuples: Vec<TupleRecord>,
    index: HashMap<String, usize>,
}

impl Relation {
    pub fn new(columns: Vec<String>, tuples: Vec<TupleRecord>) -> Result<Self> {
        if tuples.is_empty() {
            return Err(CoreError::EmptyRelation);
        }
        if columns.is_empty() {
            return Err(invalid("relation needs at least one attribute"));
        }
        let mut index = HashMap::with_capacity(tuples.len());
        for (i, t) in tuples.iter().enumerate() {
            if t.attrs.len() != columns.len() {
                return Err(CoreError::DimensionMismatch {
                    expected: columns.len(),
                    got: t.attrs.len(),
                });
            }
            if t.attrs.iter().any(|a| !a.is_finite()) {
                return Err(invalid(format!("tuple `{}` has a non-finite attribute", t.id)));
            }
            if index.insert(t.id.clone(), i).is_some() {
                return Err(CoreError::DuplicateId(t.id.clone()));
            }
        }
        Ok(Self { columns, tuples, index })
    }

    /// Reads CSV with a header row: an `id` column followed by numeric
    /// attributes.
    pub fn from_csv_reader<R: Read>(reader: R, dedup: bool) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header = rdr.headers()?.clone();
        if header.len() < 2 {
            return Err(CoreError::Parse {
                line: 1,
                message: "expected an id column and at least one attribute".into(),
            });
        }
        let columns: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
        let mut tuples = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let line = row + 2;
            if record.len() != header.len() {
                return Err(CoreError::Parse {
                    line,
                    message: format!("expected {} fields, found {}", header.len(), record.len()),
                });
            }
            let attrs = record
                .iter()
                .skip(1)
                .map(|cell| {
                    cell.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| CoreError::Parse {
                        line,
                        message: format!("non-numeric cell `{cell}`"),
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            tuples.push(TupleRecord {
                id: record[0].to_string(),
                attrs,
            });
        }
        let relation = Self::new(columns, tuples)?;
        Ok(if dedup { relation.dedup() } else { relation })
    }

    pub fn to_csv_string(&self) -> String {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["id".to_string()];
        header.extend(self.columns.iter().cloned());
        wtr.write_record(&header).expect("in-memory write");
        for t in &self.tuples {
            let mut rec = vec![t.id.clone()];
            rec.extend(t.attrs.iter().map(|a| a.to_string()));
            wtr.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(wtr.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }

    /// Keeps the first tuple of every group with identical attributes.
    pub fn dedup(&self) -> Self {
        let mut seen = HashSet::new();
        let keep: Vec<usize> = (0..self.n())
            .filter(|&i| seen.insert(self.tuples[i].attrs.iter().map(|a| a.to_bits()).collect::<Vec<_>>()))
            .collect();
        self.subset(&keep)
    }

    /// Tuples at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let tuples: Vec<TupleRecord> = indices.iter().map(|&i| self.tuples[i].clone()).collect();
        Self::new(self.columns.clone(), tuples).expect("subset of a valid relation")
    }

    /// Keeps only the listed attribute columns.
    pub fn project(&self, attrs: &[usize]) -> Result<Self> {
        if attrs.iter().any(|&a| a >= self.m()) {
            return Err(invalid("attribute index out of range"));
        }
        let columns = attrs.iter().map(|&a| self.columns[a].clone()).collect();
        let tuples = self
            .tuples
            .iter()
            .map(|t| TupleRecord {
                id: t.id.clone(),
                attrs: attrs.iter().map(|&a| t.attrs[a]).collect(),
            })
            .collect();
        Self::new(columns, tuples)
    }

    pub fn n(&self) -> usize {
        self.tuples.len()
    }

    pub fn m(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn tuples(&self) -> &[TupleRecord] {
        &self.tuples
    }

    pub fn attrs(&self, i: usize) -> &[f64] {
        &self.tuples[i].attrs
    }

    pub fn id(&self, i: usize) -> &str {
        &self.tuples[i].id
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

pub fn load_relation(path: impl AsRef<Path>, dedup: bool) -> Result<Relation> {
    let file = std::fs::File::open(path)?;
    Relation::from_csv_reader(std::io::BufReader::new(file), dedup)
}

/// Reads `id,factor` rows. A first row whose factor is not a number is taken
/// as a header and skipped.
pub fn parse_importance<R: Read>(reader: R) -> Result<HashMap<String, f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut factors = HashMap::new();
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        let line = row + 1;
        if record.len() != 2 {
            return Err(CoreError::Parse {
                line,
                message: format!("expected `id,factor`, found {} fields", record.len()),
            });
        }
        let Ok(u) = record[1].parse::<f64>() else {
            if row == 0 {
                continue;
            }
            return Err(CoreError::Parse {
                line,
                message: format!("non-numeric factor `{}`", &record[1]),
            });
        };
        if factors.insert(record[0].to_string(), u).is_some() {
            return Err(CoreError::DuplicateId(record[0].to_string()));
        }
    }
    Ok(factors)
}

/// Relation between a tuple and its successor in a given ranking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankRelation {
    Greater,
    Equal,
}

/// How the top-k prefix treats a tie group that straddles position k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopKMode {
    /// The first k tuples in ranking order, cutting the group if needed.
    #[default]
    PermutationOrder,
    /// Drops the straddling group entirely.
    StrictCutoff,
}

/// A user-supplied ranking: a permutation of tuple indices with a `>` or `=`
/// between adjacent entries.
#[derive(Debug, Clone, PartialEq)]
pub struct GivenRanking {
    order: Vec<usize>,
    relations: Vec<RankRelation>,
    /// Rank by tuple index.
    ranks: Vec<usize>,
}

impl GivenRanking {
    pub fn new(n: usize, order: Vec<usize>, relations: Vec<RankRelation>) -> Result<Self> {
        if order.len() != n {
            return Err(invalid(format!("ranking lists {} tuples, relation has {n}", order.len())));
        }
        if relations.len() + 1 != n.max(1) {
            return Err(invalid("ranking needs one relation symbol per adjacent pair"));
        }
        let mut ranks = vec![0; n];
        let mut seen = vec![false; n];
        let mut rank = 1;
        for (pos, &t) in order.iter().enumerate() {
            if t >= n || seen[t] {
                return Err(invalid("ranking is not a permutation of the relation"));
            }
            seen[t] = true;
            if pos > 0 && relations[pos - 1] == RankRelation::Greater {
                rank = pos + 1;
            }
            ranks[t] = rank;
        }
        Ok(Self { order, relations, ranks })
    }

    /// Strict ranking in the given order.
    pub fn strict(order: Vec<usize>) -> Result<Self> {
        let n = order.len();
        Self::new(n, order, vec![RankRelation::Greater; n.saturating_sub(1)])
    }

    pub fn from_ids<S: AsRef<str>>(relation: &Relation, ids: &[S], relations: Vec<RankRelation>) -> Result<Self> {
        let order = ids
            .iter()
            .map(|id| {
                relation
                    .index_of(id.as_ref())
                    .ok_or_else(|| CoreError::UnknownId(id.as_ref().to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(relation.n(), order, relations)
    }

    /// Ranking by descending score; adjacent scores within `tie_tol` are
    /// marked equal. Exact score ties are ordered by tuple index.
    pub fn from_scores(scores: &[f64], tie_tol: f64) -> Result<Self> {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        let relations = order
            .windows(2)
            .map(|w| {
                if scores[w[0]] - scores[w[1]] <= tie_tol {
                    RankRelation::Equal
                } else {
                    RankRelation::Greater
                }
            })
            .collect();
        Self::new(scores.len(), order, relations)
    }

    /// Parses the text format: one id per line, every line after the first
    /// prefixed by `>` or `=`. Blank lines and `#` comments are skipped.
    pub fn parse(relation: &Relation, text: &str) -> Result<Self> {
        let mut ids = Vec::new();
        let mut relations = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (rel, id) = match line.chars().next() {
                Some('>') => (Some(RankRelation::Greater), line[1..].trim()),
                Some('=') => (Some(RankRelation::Equal), line[1..].trim()),
                _ => (None, line),
            };
            match (ids.is_empty(), rel) {
                (true, Some(_)) => {
                    return Err(CoreError::Parse {
                        line: i + 1,
                        message: "the first entry takes no relation prefix".into(),
                    })
                }
                (false, None) => {
                    return Err(CoreError::Parse {
                        line: i + 1,
                        message: "expected `>` or `=` before the id".into(),
                    })
                }
                (_, Some(r)) => relations.push(r),
                (true, None) => {}
            }
            if id.is_empty() {
                return Err(CoreError::Parse {
                    line: i + 1,
                    message: "missing id".into(),
                });
            }
            ids.push(id.to_string());
        }
        Self::from_ids(relation, &ids, relations)
    }

    pub fn to_text(&self, relation: &Relation) -> String {
        let mut out = String::new();
        for (pos, &t) in self.order.iter().enumerate() {
            if pos > 0 {
                out.push(match self.relations[pos - 1] {
                    RankRelation::Greater => '>',
                    RankRelation::Equal => '=',
                });
            }
            out.push_str(relation.id(t));
            out.push('\n');
        }
        out
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn relations(&self) -> &[RankRelation] {
        &self.relations
    }

    /// Rank of tuple index `t`: one plus the number of tuples strictly above.
    pub fn rank(&self, t: usize) -> usize {
        self.ranks[t]
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank_of(&self, relation: &Relation, id: &str) -> Result<usize> {
        relation
            .index_of(id)
            .map(|t| self.ranks[t])
            .ok_or_else(|| CoreError::UnknownId(id.to_string()))
    }

    /// Number of leading positions forming the top-k under `mode`.
    pub fn top_k_len(&self, k: usize, mode: TopKMode) -> usize {
        let k = k.min(self.len());
        match mode {
            TopKMode::PermutationOrder => k,
            TopKMode::StrictCutoff => {
                let mut len = k;
                while len > 0 && len < self.len() && self.relations[len - 1] == RankRelation::Equal {
                    len -= 1;
                }
                len
            }
        }
    }

    pub fn top_k(&self, k: usize, mode: TopKMode) -> &[usize] {
        &self.order[..self.top_k_len(k, mode)]
    }

    /// The first `len` positions as a ranking over `0..len`, together with
    /// the original tuple indices in order.
    pub fn prefix(&self, len: usize) -> (Self, Vec<usize>) {
        self.window(0, len)
    }

    /// Positions `start..start + len` as a ranking over `0..len`, together
    /// with the original tuple indices in order.
    pub fn window(&self, start: usize, len: usize) -> (Self, Vec<usize>) {
        let start = start.min(self.len());
        let len = len.min(self.len() - start);
        let keep = self.order[start..start + len].to_vec();
        let rels = if len == 0 {
            Vec::new()
        } else {
            self.relations[start..start + len - 1].to_vec()
        };
        let sub = Self::new(len, (0..len).collect(), rels).expect("window of a valid ranking");
        (sub, keep)
    }
}

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WeightVector(Vec<f64>);

pub const SIMPLEX_TOL: f64 = 1e-9;

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(invalid("empty weight vector"));
        }
        if w.iter().any(|&x| !x.is_finite() || x < -SIMPLEX_TOL) {
            return Err(invalid("weights must be finite and nonnegative"));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(invalid(format!("weights sum to {sum}, expected 1")));
        }
        Ok(Self(w.into_iter().map(|x| x.max(0.0)).collect()))
    }

    /// Clips negative entries to zero and rescales onto the simplex. An
    /// all-zero input maps to equal weights.
    pub fn project(raw: &[f64]) -> Self {
        let clipped: Vec<f64> = raw.iter().map(|&x| if x.is_finite() { x.max(0.0) } else { 0.0 }).collect();
        let sum: f64 = clipped.iter().sum();
        if sum <= 0.0 {
            return Self::uniform(raw.len());
        }
        Self(clipped.into_iter().map(|x| x / sum).collect())
    }

    pub fn uniform(m: usize) -> Self {
        Self(vec![1.0 / m as f64; m])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn score(w: &WeightVector, t: &TupleRecord) -> Result<f64> {
    if w.len() != t.attrs.len() {
        return Err(CoreError::DimensionMismatch {
            expected: t.attrs.len(),
            got: w.len(),
        });
    }
    Ok(dot(w.as_slice(), &t.attrs))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn scores(relation: &Relation, w: &[f64]) -> Vec<f64> {
    relation.tuples().iter().map(|t| dot(w, &t.attrs)).collect()
}

/// Ranking induced by scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredRanking {
    pub scores: Vec<f64>,
    /// Rank by tuple index.
    pub ranks: Vec<usize>,
    /// Tuple indices by descending score, exact ties by index.
    pub order: Vec<usize>,
}

impl ScoredRanking {
    pub fn from_scores(scores: Vec<f64>, tie_tol: f64) -> Self {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        let sorted: Vec<f64> = order.iter().map(|&i| scores[i]).collect();
        let ranks = scores
            .iter()
            .map(|&s| 1 + sorted.partition_point(|&x| x > s + tie_tol))
            .collect();
        Self { scores, ranks, order }
    }

    pub fn top_k(&self, k: usize) -> &[usize] {
        &self.order[..k.min(self.order.len())]
    }
}

/// Rank of r is 1 + the number of tuples scoring more than `score(r) + tie_tol`.
pub fn ranking_from_scores(relation: &Relation, w: &WeightVector, tie_tol: f64) -> ScoredRanking {
    ScoredRanking::from_scores(scores(relation, w.as_slice()), tie_tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormMode {
    MinMax,
    Mean,
    ZScore,
}

impl FromStr for NormMode {
    type Err = CoreError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "minmax" | "min-max" => Ok(Self::MinMax),
            "mean" => Ok(Self::Mean),
            "zscore" | "z-score" => Ok(Self::ZScore),
            other => Err(invalid(format!("unknown normalization `{other}`"))),
        }
    }
}

impl fmt::Display for NormMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::MinMax => "minmax",
            Self::Mean => "mean",
            Self::ZScore => "zscore",
        })
    }
}

/// Per-attribute column statistics. A normalization replaces `A_i` by
/// `c_i·A_i + c'_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub columns: Vec<String>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub mean: Vec<f64>,
    /// Population standard deviation.
    pub std: Vec<f64>,
}

impl NormalizationStats {
    pub fn compute(relation: &Relation) -> Self {
        let m = relation.m();
        let n = relation.n() as f64;
        let mut min = vec![f64::INFINITY; m];
        let mut max = vec![f64::NEG_INFINITY; m];
        let mut mean = vec![0.0; m];
        for t in relation.tuples() {
            for i in 0..m {
                min[i] = min[i].min(t.attrs[i]);
                max[i] = max[i].max(t.attrs[i]);
                mean[i] += t.attrs[i] / n;
            }
        }
        let mut std = vec![0.0; m];
        for t in relation.tuples() {
            for i in 0..m {
                std[i] += (t.attrs[i] - mean[i]).powi(2) / n;
            }
        }
        std.iter_mut().for_each(|v| *v = v.sqrt());
        Self {
            columns: relation.columns().to_vec(),
            min,
            max,
            mean,
            std,
        }
    }

    /// `(c_i, c'_i)` for attribute `i`.
    pub fn affine(&self, mode: NormMode, i: usize) -> Result<(f64, f64)> {
        let (denominator, center) = match mode {
            NormMode::MinMax => (self.max[i] - self.min[i], self.min[i]),
            NormMode::Mean => (self.max[i] - self.min[i], self.mean[i]),
            NormMode::ZScore => (self.std[i], self.mean[i]),
        };
        if denominator <= 0.0 {
            return Err(CoreError::ZeroScale(self.columns[i].clone()));
        }
        Ok((1.0 / denominator, -center / denominator))
    }

    pub fn normalize(&self, relation: &Relation, mode: NormMode) -> Result<Relation> {
        let coefs = (0..relation.m())
            .map(|i| self.affine(mode, i))
            .collect::<Result<Vec<_>>>()?;
        let tuples = relation
            .tuples()
            .iter()
            .map(|t| TupleRecord {
                id: t.id.clone(),
                attrs: t.attrs.iter().zip(&coefs).map(|(a, (c, c0))| c * a + c0).collect(),
            })
            .collect();
        Relation::new(relation.columns().to_vec(), tuples)
    }
}

/// Weights that reproduce, on normalized data, the ranking `w` induces on
/// the raw data: `w_i / c_i`, rescaled onto the simplex.
pub fn transform_weights(w: &WeightVector, stats: &NormalizationStats, mode: NormMode) -> Result<WeightVector> {
    if w.len() != stats.columns.len() {
        return Err(CoreError::DimensionMismatch {
            expected: stats.columns.len(),
            got: w.len(),
        });
    }
    let raw = w
        .as_slice()
        .iter()
        .enumerate()
        .map(|(i, &wi)| stats.affine(mode, i).map(|(c, _)| wi / c))
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightVector::project(&raw))
}

/// `n` tuples `t1..tn` with `m` attributes `A1..Am`, iid uniform on [0, 1).
pub fn generate_uniform(n: usize, m: usize, seed: u64) -> Result<Relation> {
    if n == 0 || m == 0 {
        return Err(invalid("n and m must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let columns = (1..=m).map(|i| format!("A{i}")).collect();
    let tuples = (1..=n)
        .map(|i| TupleRecord {
            id: format!("t{i}"),
            attrs: (0..m).map(|_| rng.random::<f64>()).collect(),
        })
        .collect();
    Relation::new(columns, tuples)
}

/// Strict ranking by descending attribute sum (ties by tuple index).
pub fn sum_ranking(relation: &Relation) -> GivenRanking {
    let sums: Vec<f64> = relation.tuples().iter().map(|t| t.attrs.iter().sum()).collect();
    let mut order: Vec<usize> = (0..relation.n()).collect();
    order.sort_by(|&a, &b| sums[b].total_cmp(&sums[a]).then(a.cmp(&b)));
    GivenRanking::strict(order).expect("permutation")
}

/// Sorts by attribute sum, then moves positions 6-10 to the front.
pub fn build_unsat_ranking(relation: &Relation) -> Result<GivenRanking> {
    if relation.n() < 10 {
        return Err(invalid("the construction needs at least 10 tuples"));
    }
    let base = sum_ranking(relation);
    let o = base.order();
    let mut order = Vec::with_capacity(o.len());
    order.extend_from_slice(&o[5..10]);
    order.extend_from_slice(&o[..5]);
    order.extend_from_slice(&o[10..]);
    GivenRanking::strict(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Relation {
        Relation::from_csv_reader("id,A1,A2,A3\nr,3,2,8\ns,4,1,15\nt,1,1,14\n".as_bytes(), false).unwrap()
    }

    #[test]
    fn loads_csv() {
        let r = example();
        assert_eq!((r.n(), r.m()), (3, 3));
        assert_eq!(r.attrs(0), &[3.0, 2.0, 8.0]);
    }

    #[test]
    fn rejects_bad_csv() {
        assert!(matches!(
            Relation::from_csv_reader("id,A1\n".as_bytes(), false),
            Err(CoreError::EmptyRelation)
        ));
        assert!(matches!(
            Relation::from_csv_reader("id,A1\na,x\n".as_bytes(), false),
            Err(CoreError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Relation::from_csv_reader("id,A1\na,1\na,2\n".as_bytes(), false),
            Err(CoreError::DuplicateId(_))
        ));
    }

    #[test]
    fn dedup_keeps_first() {
        let r = Relation::from_csv_reader("id,A1,A2\na,1,2\nb,1,2\nc,3,4\n".as_bytes(), true).unwrap();
        assert_eq!(r.n(), 2);
        assert_eq!(r.id(0), "a");
    }

    #[test]
    fn ranks_with_ties() {
        let r = Relation::from_csv_reader("id,A\nr1,1\nr2,1\nr3,1\nr4,1\n".as_bytes(), false).unwrap();
        let pi = GivenRanking::parse(&r, "r1\n>r2\n=r3\n>r4\n").unwrap();
        let ranks: Vec<usize> = ["r1", "r2", "r3", "r4"].iter().map(|id| pi.rank_of(&r, id).unwrap()).collect();
        assert_eq!(ranks, vec![1, 2, 2, 4]);
        assert_eq!(pi.to_text(&r), "r1\n>r2\n=r3\n>r4\n");
        let all = GivenRanking::parse(&r, "r1\n=r2\n=r3\n=r4").unwrap();
        assert!(all.ranks().iter().all(|&x| x == 1));
        assert!(pi.rank_of(&r, "zz").is_err());
    }

    #[test]
    fn ranking_parse_errors() {
        let r = example();
        assert!(GivenRanking::parse(&r, ">r\n>s\n>t").is_err());
        assert!(GivenRanking::parse(&r, "r\ns\n>t").is_err());
        assert!(GivenRanking::parse(&r, "r\n>s").is_err());
        assert!(GivenRanking::parse(&r, "r\n>s\n>q").is_err());
    }

    #[test]
    fn top_k_modes() {
        let pi = GivenRanking::new(4, vec![0, 1, 2, 3], vec![RankRelation::Greater, RankRelation::Equal, RankRelation::Greater])
            .unwrap();
        assert_eq!(pi.top_k(2, TopKMode::PermutationOrder), &[0, 1]);
        assert_eq!(pi.top_k(2, TopKMode::StrictCutoff), &[0]);
        assert_eq!(pi.top_k(3, TopKMode::StrictCutoff), &[0, 1, 2]);
    }

    #[test]
    fn scores_and_ties() {
        let r = example();
        let t = &r.tuples()[0];
        assert_eq!(score(&WeightVector::new(vec![1.0, 0.0, 0.0]).unwrap(), t).unwrap(), 3.0);
        let third = WeightVector::uniform(3);
        assert!((score(&third, t).unwrap() - 13.0 / 3.0).abs() < 1e-12);
        assert!(score(&WeightVector::uniform(2), t).is_err());

        let sr = ScoredRanking::from_scores(vec![9.0, 6.0, 6.0, 5.0], 0.0);
        assert_eq!(sr.ranks, vec![1, 2, 2, 4]);
        let tau = 1e-6;
        let sr = ScoredRanking::from_scores(vec![1.0, 1.0 + tau / 2.0], tau);
        assert_eq!(sr.ranks, vec![1, 1]);
    }

    #[test]
    fn weight_vector_validation() {
        assert!(WeightVector::new(vec![0.5, 0.6]).is_err());
        assert!(WeightVector::new(vec![-0.5, 1.5]).is_err());
        let p = WeightVector::project(&[-1.0, 2.0, 2.0]);
        assert_eq!(p.as_slice(), &[0.0, 0.5, 0.5]);
    }

    #[test]
    fn zscore_transform_scales_by_std() {
        let r = Relation::from_csv_reader("id,A,B\na,0,0\nb,2,10\n".as_bytes(), false).unwrap();
        let stats = NormalizationStats::compute(&r);
        assert_eq!(stats.std, vec![1.0, 5.0]);
        let w = WeightVector::new(vec![0.5, 0.5]).unwrap();
        let t = transform_weights(&w, &stats, NormMode::ZScore).unwrap();
        // proportional to w_i * sigma_i = (0.5, 2.5)
        assert!((t.as_slice()[0] - 1.0 / 6.0).abs() < 1e-12);
        assert!((t.as_slice()[1] - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn constant_column_is_rejected() {
        let r = Relation::from_csv_reader("id,A,B\na,1,0\nb,1,10\n".as_bytes(), false).unwrap();
        let stats = NormalizationStats::compute(&r);
        let w = WeightVector::uniform(2);
        assert!(matches!(transform_weights(&w, &stats, NormMode::MinMax), Err(CoreError::ZeroScale(_))));
    }

    #[test]
    fn unsat_construction_moves_block() {
        let cols = vec!["A".to_string()];
        let tuples = (1..=12)
            .map(|i| TupleRecord {
                id: format!("a{i}"),
                attrs: vec![(100 - i) as f64],
            })
            .collect();
        let r = Relation::new(cols, tuples).unwrap();
        let pi = build_unsat_ranking(&r).unwrap();
        let ids: Vec<&str> = pi.order().iter().map(|&t| r.id(t)).collect();
        assert_eq!(
            ids,
            vec!["a6", "a7", "a8", "a9", "a10", "a1", "a2", "a3", "a4", "a5", "a11", "a12"]
        );
        assert!(build_unsat_ranking(&r.subset(&[0, 1, 2])).is_err());
    }
}
