//! Exact optimum of `max c.x  s.t.  A x <= b, x in {0,1}^n` for small instances.

use crate::error::{CoverError, Result};

pub const MAX_ENUMERATION_VARS: usize = 22;
pub const MAX_SEARCH_VARS: usize = 40;
const MAX_DP_CAPACITY: i64 = 50_000_000;

/// Optimal value and one optimal point, or `None` if no 0-1 point is feasible.
pub type Optimum = Option<(i64, Vec<bool>)>;

/// Picks the cheapest exact method: a capacity DP for one nonnegative row,
/// full enumeration up to 22 variables, or depth-first search with
/// per-row fractional bounds for nonnegative rows.
pub fn ip_optimum(objective: &[i64], rows: &[Vec<i64>], rhs: &[i64]) -> Result<Optimum> {
    let n = objective.len();
    if rows.len() != rhs.len() {
        return Err(CoverError::DimensionMismatch { expected: rows.len(), got: rhs.len() });
    }
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(CoverError::DimensionMismatch { expected: n, got: r.len() });
    }
    let nonnegative = rows.iter().flatten().all(|&a| a >= 0);
    if nonnegative && rhs.iter().any(|&b| b < 0) {
        return Ok(None);
    }
    if nonnegative && rows.len() == 1 && rhs[0] <= MAX_DP_CAPACITY {
        return Ok(Some(knapsack_dp(objective, &rows[0], rhs[0])));
    }
    if n <= MAX_ENUMERATION_VARS {
        return Ok(enumerate(objective, rows, rhs));
    }
    if nonnegative && n <= MAX_SEARCH_VARS {
        return Ok(Some(BoundedSearch::new(objective, rows, rhs).run()));
    }
    Err(CoverError::BudgetExceeded { what: "variables", got: n, limit: MAX_ENUMERATION_VARS })
}

/// Gray-code walk over all `2^n` points with incremental row activities.
pub fn enumerate(objective: &[i64], rows: &[Vec<i64>], rhs: &[i64]) -> Optimum {
    let n = objective.len();
    let mut x = vec![false; n];
    let mut activity = vec![0i64; rows.len()];
    let mut value = 0i64;
    let feasible = |act: &[i64]| act.iter().zip(rhs).all(|(a, b)| a <= b);
    let mut best: Optimum = feasible(&activity).then(|| (0, x.clone()));
    for step in 1u64..(1u64 << n) {
        let j = step.trailing_zeros() as usize;
        let sign = if x[j] { -1 } else { 1 };
        x[j] = !x[j];
        value += sign * objective[j];
        for (act, row) in activity.iter_mut().zip(rows) {
            *act += sign * row[j];
        }
        if feasible(&activity) && best.as_ref().is_none_or(|(v, _)| value > *v) {
            best = Some((value, x.clone()));
        }
    }
    best
}

fn knapsack_dp(objective: &[i64], weights: &[i64], capacity: i64) -> (i64, Vec<bool>) {
    let n = objective.len();
    let cap = capacity as usize;
    let mut best = vec![0i64; cap + 1];
    let mut take = vec![vec![false; cap + 1]; n];
    for j in 0..n {
        let (c, a) = (objective[j], weights[j] as usize);
        if c <= 0 || a > cap {
            continue;
        }
        for r in (a..=cap).rev() {
            if best[r - a] + c > best[r] {
                best[r] = best[r - a] + c;
                take[j][r] = true;
            }
        }
    }
    let mut x = vec![false; n];
    let mut r = cap;
    for j in (0..n).rev() {
        if take[j][r] {
            x[j] = true;
            r -= weights[j] as usize;
        }
    }
    (best[cap], x)
}

struct BoundedSearch<'a> {
    objective: &'a [i64],
    rows: &'a [Vec<i64>],
    order: Vec<usize>,
    /// Per row, the items of `order` positions sorted by profit density.
    density_orders: Vec<Vec<usize>>,
    slack: Vec<i64>,
    x: Vec<bool>,
    best: i64,
    best_x: Vec<bool>,
}

impl<'a> BoundedSearch<'a> {
    fn new(objective: &'a [i64], rows: &'a [Vec<i64>], rhs: &[i64]) -> Self {
        let n = objective.len();
        let mut order: Vec<usize> = (0..n).filter(|&j| objective[j] > 0).collect();
        order.sort_by(|&a, &b| objective[b].cmp(&objective[a]).then(a.cmp(&b)));
        let density_orders = rows
            .iter()
            .map(|row| {
                let mut d = order.clone();
                // c_a / w_a > c_b / w_b, zero weights first
                d.sort_by(|&a, &b| {
                    (objective[b] as i128 * row[a] as i128).cmp(&(objective[a] as i128 * row[b] as i128))
                });
                d
            })
            .collect();
        Self {
            objective,
            rows,
            order,
            density_orders,
            slack: rhs.to_vec(),
            x: vec![false; n],
            best: 0,
            best_x: vec![false; n],
        }
    }

    /// Fractional bound on the extra profit from undecided items.
    fn bound(&self, decided: &[bool]) -> f64 {
        let mut bound = f64::INFINITY;
        for (r, row) in self.rows.iter().enumerate() {
            let mut room = self.slack[r] as f64;
            let mut total = 0.0;
            for &j in &self.density_orders[r] {
                if decided[j] {
                    continue;
                }
                let (c, a) = (self.objective[j] as f64, row[j] as f64);
                if a <= room {
                    room -= a;
                    total += c;
                } else {
                    total += c * room / a;
                    break;
                }
            }
            bound = bound.min(total);
        }
        bound
    }

    fn search(&mut self, depth: usize, value: i64, decided: &mut Vec<bool>) {
        if value > self.best {
            self.best = value;
            self.best_x = self.x.clone();
        }
        if depth == self.order.len() {
            return;
        }
        if value as f64 + self.bound(decided) < self.best as f64 + 1.0 - 1e-9 {
            return;
        }
        let j = self.order[depth];
        decided[j] = true;
        if self.rows.iter().zip(&self.slack).all(|(row, &s)| row[j] <= s) {
            for (s, row) in self.slack.iter_mut().zip(self.rows) {
                *s -= row[j];
            }
            self.x[j] = true;
            self.search(depth + 1, value + self.objective[j], decided);
            self.x[j] = false;
            for (s, row) in self.slack.iter_mut().zip(self.rows) {
                *s += row[j];
            }
        }
        self.search(depth + 1, value, decided);
        decided[j] = false;
    }

    fn run(mut self) -> (i64, Vec<bool>) {
        let mut decided = vec![false; self.objective.len()];
        self.search(0, 0, &mut decided);
        (self.best, self.best_x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn methods_agree_on_small_instance() {
        let c = vec![5, 7, 9, 1, 2, 6, 6, 5];
        let rows = vec![vec![45, 44, 42, 40, 11, 10, 10, 6]];
        let rhs = vec![100];
        let dp = ip_optimum(&c, &rows, &rhs).unwrap().unwrap();
        let full = enumerate(&c, &rows, &rhs).unwrap();
        let dfs = BoundedSearch::new(&c, &rows, &rhs).run();
        assert_eq!(dp.0, full.0);
        assert_eq!(dfs.0, full.0);
    }

    #[test]
    fn multi_row_search_matches_enumeration() {
        let c = vec![10, 13, 7, 8, 9, 4, 12, 3, 6, 11];
        let rows = vec![vec![5, 7, 3, 4, 6, 2, 8, 1, 3, 6], vec![3, 2, 6, 5, 1, 4, 2, 7, 5, 3]];
        let rhs = vec![20, 18];
        let full = enumerate(&c, &rows, &rhs).unwrap();
        let dfs = BoundedSearch::new(&c, &rows, &rhs).run();
        assert_eq!(full.0, dfs.0);
        for (row, b) in rows.iter().zip(&rhs) {
            let act: i64 = row.iter().zip(&dfs.1).filter(|(_, &x)| x).map(|(a, _)| a).sum();
            assert!(act <= *b);
        }
    }

    #[test]
    fn infeasible_and_mixed_sign() {
        let c = vec![1, 1];
        assert_eq!(ip_optimum(&c, &[vec![-1, -1]], &[-3]).unwrap(), None);
        assert_eq!(ip_optimum(&c, &[vec![-1, 2]], &[1]).unwrap().unwrap().0, 2);
    }
}
