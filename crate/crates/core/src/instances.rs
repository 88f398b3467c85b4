//! Binary programs `max c.x, A x <= b`: row normalization, random
//! generators and a plain-text file format.
//!
//! File format: line 1 is `n m`, line 2 holds the `n` objective integers and
//! each of the next `m` lines holds `a_1 ... a_n b`. Text after `#` is a
//! comment; comments of the form `# name: ...`, `# seed: ...` and
//! `# provenance: ...` carry metadata.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::error::CoverError;
use crate::knapsack::KnapsackRow;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("row {row} has no nonzero coefficient")]
    EmptyRow { row: usize },
    #[error("row {row} is infeasible: right-hand side {rhs} < 0 after complementing")]
    InfeasibleRow { row: usize, rhs: i64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid generator parameters: {0}")]
    Generator(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Row(#[from] CoverError),
}

pub type Result<T, E = InstanceError> = std::result::Result<T, E>;

/// A `<=` row exactly as given, possibly with negative coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RawRow {
    pub coefficients: Vec<i64>,
    pub rhs: i64,
}

/// A row rewritten over complemented variables `x'_j` so that every weight
/// is positive and fits in the capacity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedRow {
    /// Original variable behind each knapsack item.
    pub vars: Vec<usize>,
    /// Whether item `p` stands for `1 - x_{vars[p]}`.
    pub complemented: Vec<bool>,
    /// `None` when no item remains.
    pub row: Option<KnapsackRow>,
    /// Original variables forced by an oversized weight, with their forced value.
    pub fixings: Vec<(usize, bool)>,
}

impl NormalizedRow {
    /// Rewrites a local cut `sum_p alpha_p x'_p <= r` over the original variables.
    pub fn to_global(&self, n: usize, local: &[f64], rhs: f64) -> (Vec<f64>, f64) {
        let mut coeffs = vec![0.0; n];
        let mut rhs = rhs;
        for (p, &alpha) in local.iter().enumerate() {
            if self.complemented[p] {
                coeffs[self.vars[p]] -= alpha;
                rhs -= alpha;
            } else {
                coeffs[self.vars[p]] += alpha;
            }
        }
        (coeffs, rhs)
    }

    /// The row's view of a global point (complemented where needed).
    pub fn to_local(&self, x: &[f64]) -> Vec<f64> {
        self.vars
            .iter()
            .zip(&self.complemented)
            .map(|(&j, &c)| if c { 1.0 - x[j] } else { x[j] })
            .collect()
    }
}

/// Complements negative coefficients, drops zeros and fixes variables whose
/// weight exceeds the capacity.
pub fn normalize_row(coefficients: &[i64], rhs: i64) -> Result<NormalizedRow> {
    normalize_row_at(0, coefficients, rhs)
}

fn normalize_row_at(index: usize, coefficients: &[i64], rhs: i64) -> Result<NormalizedRow> {
    if coefficients.iter().all(|&a| a == 0) {
        return Err(InstanceError::EmptyRow { row: index });
    }
    let capacity = rhs - coefficients.iter().filter(|&&a| a < 0).sum::<i64>();
    if capacity < 0 {
        return Err(InstanceError::InfeasibleRow { row: index, rhs: capacity });
    }
    let mut vars = Vec::new();
    let mut complemented = Vec::new();
    let mut weights = Vec::new();
    let mut fixings = Vec::new();
    for (j, &a) in coefficients.iter().enumerate() {
        if a == 0 {
            continue;
        }
        if a.abs() > capacity {
            // x'_j must be 0
            fixings.push((j, a < 0));
            continue;
        }
        vars.push(j);
        complemented.push(a < 0);
        weights.push(a.abs());
    }
    let row = if weights.is_empty() { None } else { Some(KnapsackRow::new(weights, capacity)?) };
    Ok(NormalizedRow { vars, complemented, row, fixings })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Metadata {
    pub seed: Option<u64>,
    pub provenance: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IpInstance {
    pub name: String,
    pub objective: Vec<i64>,
    pub rows: Vec<RawRow>,
    pub metadata: Metadata,
}

impl IpInstance {
    pub fn new(name: impl Into<String>, objective: Vec<i64>, rows: Vec<RawRow>) -> Result<Self> {
        let n = objective.len();
        if let Some(r) = rows.iter().find(|r| r.coefficients.len() != n) {
            return Err(InstanceError::Dimension { expected: n, got: r.coefficients.len() });
        }
        Ok(Self { name: name.into(), objective, rows, metadata: Metadata::default() })
    }

    pub fn n(&self) -> usize {
        self.objective.len()
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn normalized_rows(&self) -> Result<Vec<NormalizedRow>> {
        self.rows.iter().enumerate().map(|(i, r)| normalize_row_at(i, &r.coefficients, r.rhs)).collect()
    }

    pub fn row_matrix(&self) -> (Vec<Vec<i64>>, Vec<i64>) {
        (self.rows.iter().map(|r| r.coefficients.clone()).collect(), self.rows.iter().map(|r| r.rhs).collect())
    }

    pub fn is_feasible(&self, x: &[bool]) -> bool {
        self.rows.iter().all(|r| {
            r.coefficients.iter().zip(x).filter(|(_, &v)| v).map(|(a, _)| a).sum::<i64>() <= r.rhs
        })
    }

    pub fn objective_value(&self, x: &[bool]) -> i64 {
        self.objective.iter().zip(x).filter(|(_, &v)| v).map(|(c, _)| c).sum()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "# name: {}", self.name).unwrap();
        if let Some(seed) = self.metadata.seed {
            writeln!(out, "# seed: {seed}").unwrap();
        }
        if let Some(p) = &self.metadata.provenance {
            writeln!(out, "# provenance: {p}").unwrap();
        }
        writeln!(out, "{} {}", self.n(), self.m()).unwrap();
        writeln!(out, "{}", join(&self.objective)).unwrap();
        for r in &self.rows {
            writeln!(out, "{} {}", join(&r.coefficients), r.rhs).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        parse(text)
    }
}

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ")
}

/// Integers on one logical line with their 1-based column numbers.
struct Tokens<'a> {
    line: usize,
    items: Vec<(usize, &'a str)>,
}

impl Tokens<'_> {
    fn ints(&self, expected: usize, what: &str) -> Result<Vec<i64>> {
        if self.items.len() != expected {
            let column = self.items.get(expected).map_or(1, |t| t.0);
            return Err(InstanceError::Parse {
                line: self.line,
                column,
                message: format!("expected {expected} integers for {what}, found {}", self.items.len()),
            });
        }
        self.items
            .iter()
            .map(|&(column, tok)| {
                tok.parse::<i64>().map_err(|_| InstanceError::Parse {
                    line: self.line,
                    column,
                    message: format!("'{tok}' is not an integer"),
                })
            })
            .collect()
    }
}

fn parse(text: &str) -> Result<IpInstance> {
    let mut name = None;
    let mut metadata = Metadata::default();
    let mut lines = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let (body, comment) = match raw.find('#') {
            Some(p) => (&raw[..p], Some(raw[p + 1..].trim())),
            None => (raw, None),
        };
        if let Some(c) = comment {
            if let Some((key, value)) = c.split_once(':') {
                let value = value.trim();
                match key.trim() {
                    "name" => name = Some(value.to_string()),
                    "seed" => metadata.seed = value.parse().ok(),
                    "provenance" => metadata.provenance = Some(value.to_string()),
                    _ => {}
                }
            }
        }
        let mut items = Vec::new();
        let mut start = None;
        for (pos, ch) in body.char_indices().chain(std::iter::once((body.len(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    items.push((s + 1, &body[s..pos]));
                    start = None;
                }
                _ => {}
            }
        }
        if !items.is_empty() {
            lines.push(Tokens { line, items });
        }
    }
    let eof = |what: &str| InstanceError::Parse {
        line: text.lines().count() + 1,
        column: 1,
        message: format!("unexpected end of file, expected {what}"),
    };
    let mut it = lines.into_iter();
    let header = it.next().ok_or_else(|| eof("header 'n m'"))?.ints(2, "the header")?;
    let (n, m) = (header[0], header[1]);
    if n < 1 || m < 0 {
        return Err(InstanceError::Parse { line: 1, column: 1, message: format!("bad sizes n={n}, m={m}") });
    }
    let (n, m) = (n as usize, m as usize);
    let objective = it.next().ok_or_else(|| eof("objective"))?.ints(n, "the objective")?;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let line = it.next().ok_or_else(|| eof(&format!("row {}", i + 1)))?;
        let mut v = line.ints(n + 1, &format!("row {}", i + 1))?;
        let rhs = v.pop().unwrap();
        rows.push(RawRow { coefficients: v, rhs });
    }
    if let Some(extra) = it.next() {
        return Err(InstanceError::Parse {
            line: extra.line,
            column: extra.items[0].0,
            message: "unexpected data after the last row".into(),
        });
    }
    let mut inst = IpInstance::new(name.unwrap_or_else(|| "unnamed".into()), objective, rows)?;
    inst.metadata = metadata;
    inst.normalized_rows()?;
    Ok(inst)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<IpInstance> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| InstanceError::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse(&text)
}

pub fn write_instance(instance: &IpInstance, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path.as_ref(), instance.to_text())
        .map_err(|e| InstanceError::Io(format!("{}: {e}", path.as_ref().display())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MkpKind {
    Uncorrelated,
    WeaklyCorrelated,
}

/// Multi-dimensional knapsack with weights in `[10, 1000]` and capacities at
/// half the row sums. Weakly correlated profits follow the first row.
pub fn gen_mkp(kind: MkpKind, n: usize, m: usize, seed: u64) -> Result<IpInstance> {
    if n == 0 || m == 0 {
        return Err(InstanceError::Generator(format!("need n, m >= 1, got n={n}, m={m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weights: Vec<Vec<i64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(10..=1000)).collect()).collect();
    let objective: Vec<i64> = match kind {
        MkpKind::Uncorrelated => (0..n).map(|_| rng.gen_range(10..=1000)).collect(),
        MkpKind::WeaklyCorrelated => weights[0].iter().map(|&a| (a + rng.gen_range(-100..=100)).max(1)).collect(),
    };
    let rows = weights
        .into_iter()
        .map(|coefficients| {
            let rhs = coefficients.iter().sum::<i64>() / 2;
            RawRow { coefficients, rhs }
        })
        .collect();
    let tag = match kind {
        MkpKind::Uncorrelated => "uncorrelated",
        MkpKind::WeaklyCorrelated => "weakly-correlated",
    };
    let mut inst = IpInstance::new(format!("mkp-{tag}-n{n}-m{m}-s{seed}"), objective, rows)?;
    inst.metadata = Metadata { seed: Some(seed), provenance: Some(format!("gen_mkp {tag}")) };
    Ok(inst)
}

/// Single row with `c = a`, `a_j` in `[1, 10^4]` and capacity half the weight sum.
pub fn gen_chvatal(n: usize, seed: u64) -> Result<IpInstance> {
    if n == 0 {
        return Err(InstanceError::Generator("need n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=10_000)).collect();
    let rhs = a.iter().sum::<i64>() / 2;
    let mut inst = IpInstance::new(format!("chvatal-n{n}-s{seed}"), a.clone(), vec![RawRow { coefficients: a, rhs }])?;
    inst.metadata = Metadata { seed: Some(seed), provenance: Some("gen_chvatal".into()) };
    Ok(inst)
}

/// Textual generator request such as `mkp-weak:n=40,m=5,seed=3` or `chvatal:n=20,seed=1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneratorSpec {
    Mkp { kind: MkpKind, n: usize, m: usize, seed: u64 },
    Chvatal { n: usize, seed: u64 },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<IpInstance> {
        match *self {
            GeneratorSpec::Mkp { kind, n, m, seed } => gen_mkp(kind, n, m, seed),
            GeneratorSpec::Chvatal { n, seed } => gen_chvatal(n, seed),
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = InstanceError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| InstanceError::Generator(msg);
        let (family, params) = s.split_once(':').unwrap_or((s, ""));
        let mut n = None;
        let mut m = 1usize;
        let mut seed = 0u64;
        for kv in params.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = kv.split_once('=').ok_or_else(|| bad(format!("expected key=value, got '{kv}'")))?;
            let num = |v: &str| v.trim().parse::<u64>().map_err(|_| bad(format!("'{v}' is not a number")));
            match k.trim() {
                "n" => n = Some(num(v)? as usize),
                "m" => m = num(v)? as usize,
                "seed" => seed = num(v)?,
                other => return Err(bad(format!("unknown parameter '{other}'"))),
            }
        }
        let n = n.ok_or_else(|| bad("missing n".into()))?;
        match family.trim() {
            "mkp-uncorrelated" | "uncorrelated" => Ok(GeneratorSpec::Mkp { kind: MkpKind::Uncorrelated, n, m, seed }),
            "mkp-weak" | "weakly-correlated" => Ok(GeneratorSpec::Mkp { kind: MkpKind::WeaklyCorrelated, n, m, seed }),
            "chvatal" => Ok(GeneratorSpec::Chvatal { n, seed }),
            other => Err(bad(format!("unknown generator '{other}'"))),
        }
    }
}
