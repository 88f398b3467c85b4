//! Heuristics that pick minimal covers of a knapsack row from an LP point.
//!
//! Every routine only uses items with `x_j > 1e-7`. Ties in any ordering
//! break by ascending item index, which makes all outputs deterministic.

use std::cmp::Ordering;

use crate::error::{CoverError, Result};
use crate::knapsack::{is_minimal_cover, KnapsackRow};

/// Items with LP value at or below this are treated as zero.
pub const SUPPORT_TOLERANCE: f64 = 1e-7;

/// Fractional point with every entry clamped into `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct LpPoint {
    values: Vec<f64>,
}

impl LpPoint {
    pub fn new(values: Vec<f64>) -> Self {
        Self { values: values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect() }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Items with a positive value, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&j| self.values[j] > SUPPORT_TOLERANCE).collect()
    }
}

/// Cover heuristic selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverRoutine {
    Contiguous,
    Spread,
    Heaviest,
    Default,
    BangForBuck,
}

impl CoverRoutine {
    pub const ALL: [CoverRoutine; 5] = [
        CoverRoutine::Contiguous,
        CoverRoutine::Spread,
        CoverRoutine::Heaviest,
        CoverRoutine::Default,
        CoverRoutine::BangForBuck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CoverRoutine::Contiguous => "contiguous",
            CoverRoutine::Spread => "spread",
            CoverRoutine::Heaviest => "heaviest",
            CoverRoutine::Default => "default",
            CoverRoutine::BangForBuck => "bang-for-buck",
        }
    }
}

impl std::fmt::Display for CoverRoutine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CoverRoutine {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        CoverRoutine::ALL
            .into_iter()
            .find(|r| r.name() == s || (s == "bang" && *r == CoverRoutine::BangForBuck))
            .ok_or_else(|| format!("unknown cover routine '{s}'"))
    }
}

/// Runs one routine; the single-cover routines yield at most one set.
pub fn generate_covers(
    routine: CoverRoutine,
    row: &KnapsackRow,
    point: &LpPoint,
    objective: &[i64],
) -> Result<Vec<Vec<usize>>> {
    Ok(match routine {
        CoverRoutine::Contiguous => contiguous_covers(row, point)?,
        CoverRoutine::Spread => spread_covers(row, point)?,
        CoverRoutine::Heaviest => heaviest_contiguous_cover(row, point)?.into_iter().collect(),
        CoverRoutine::Default => default_cover(row, point)?.into_iter().collect(),
        CoverRoutine::BangForBuck => bang_for_buck_cover(row, point, objective)?.into_iter().collect(),
    })
}

fn check_dims(row: &KnapsackRow, point: &LpPoint) -> Result<()> {
    if row.len() != point.len() {
        return Err(CoverError::DimensionMismatch { expected: row.len(), got: point.len() });
    }
    Ok(())
}

/// Support sorted by descending weight.
fn by_weight(row: &KnapsackRow, point: &LpPoint) -> Vec<usize> {
    let mut items = point.support();
    items.sort_by(|&a, &b| row.weight(b).cmp(&row.weight(a)).then(a.cmp(&b)));
    items
}

fn finish(row: &KnapsackRow, mut set: Vec<usize>) -> Vec<usize> {
    set.sort_unstable();
    debug_assert!(is_minimal_cover(row, &set).unwrap_or(false), "{set:?} is not a minimal cover");
    set
}

fn push_unique(out: &mut Vec<Vec<usize>>, set: Vec<usize>) {
    if !out.contains(&set) {
        out.push(set);
    }
}

/// First cover obtained by appending `order[from..]` one at a time to `prefix`.
fn grow(row: &KnapsackRow, prefix: &[usize], order: &[usize]) -> Option<Vec<usize>> {
    let mut set = prefix.to_vec();
    let mut weight: i64 = prefix.iter().map(|&j| row.weight(j)).sum();
    for &j in order {
        set.push(j);
        weight += row.weight(j);
        if weight > row.capacity() {
            return Some(set);
        }
    }
    None
}

/// For each start position in descending-weight order, the shortest run
/// from there that is a cover.
pub fn contiguous_covers(row: &KnapsackRow, point: &LpPoint) -> Result<Vec<Vec<usize>>> {
    check_dims(row, point)?;
    let order = by_weight(row, point);
    let mut out = Vec::new();
    for i in 0..order.len() {
        match grow(row, &[], &order[i..]) {
            Some(set) => push_unique(&mut out, finish(row, set)),
            None => break,
        }
    }
    Ok(out)
}

/// For each head, the cover `{head} + run` whose run starts as far down the
/// weight order as possible.
pub fn spread_covers(row: &KnapsackRow, point: &LpPoint) -> Result<Vec<Vec<usize>>> {
    check_dims(row, point)?;
    let order = by_weight(row, point);
    let mut out = Vec::new();
    for i in 0..order.len() {
        let found = (i + 1..order.len()).rev().find_map(|j| grow(row, &order[i..=i], &order[j..]));
        if let Some(set) = found {
            push_unique(&mut out, finish(row, set));
        }
    }
    Ok(out)
}

pub fn heaviest_contiguous_cover(row: &KnapsackRow, point: &LpPoint) -> Result<Option<Vec<usize>>> {
    check_dims(row, point)?;
    Ok(grow(row, &[], &by_weight(row, point)).map(|set| finish(row, set)))
}

/// Takes items in the given order until they cover, then repeatedly drops
/// the lightest item whose removal still leaves a cover.
fn greedy_then_evict(row: &KnapsackRow, order: &[usize]) -> Option<Vec<usize>> {
    let mut set = grow(row, &[], order)?;
    let mut weight: i64 = set.iter().map(|&j| row.weight(j)).sum();
    loop {
        let evict = set
            .iter()
            .enumerate()
            .filter(|&(_, &j)| weight - row.weight(j) > row.capacity())
            .min_by(|(_, &a), (_, &b)| row.weight(a).cmp(&row.weight(b)).then(a.cmp(&b)))
            .map(|(pos, _)| pos);
        match evict {
            Some(pos) => weight -= row.weight(set.remove(pos)),
            None => return Some(finish(row, set)),
        }
    }
}

/// Greedy by descending LP value.
pub fn default_cover(row: &KnapsackRow, point: &LpPoint) -> Result<Option<Vec<usize>>> {
    check_dims(row, point)?;
    let x = point.values();
    let mut order = point.support();
    order.sort_by(|&a, &b| x[b].partial_cmp(&x[a]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    Ok(greedy_then_evict(row, &order))
}

/// Greedy by descending `c_j / a_j`.
pub fn bang_for_buck_cover(row: &KnapsackRow, point: &LpPoint, objective: &[i64]) -> Result<Option<Vec<usize>>> {
    check_dims(row, point)?;
    if objective.len() != row.len() {
        return Err(CoverError::DimensionMismatch { expected: row.len(), got: objective.len() });
    }
    let mut order = point.support();
    // c_a / w_a > c_b / w_b  <=>  c_a w_b > c_b w_a
    order.sort_by(|&a, &b| {
        let lhs = objective[a] as i128 * row.weight(b) as i128;
        let rhs = objective[b] as i128 * row.weight(a) as i128;
        rhs.cmp(&lhs).then(a.cmp(&b))
    });
    Ok(greedy_then_evict(row, &order))
}
