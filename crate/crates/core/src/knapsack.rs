//! Knapsack rows, minimal covers and the exact lifting function.
//!
//! A [`CoverParams`] stores the cover in descending-weight order (ties by
//! ascending original index) together with the prefix sums `mu`, the excess
//! weight `lambda` and the swap excesses `rho`. Every index handed in or out
//! is an original row index; the internal relabeling never leaks.

use std::fmt;

use crate::error::{CoverError, Result};
use crate::Rational;

/// One knapsack constraint `sum_j a_j x_j <= b` over binary variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KnapsackRow {
    weights: Vec<i64>,
    capacity: i64,
}

impl KnapsackRow {
    pub fn new(weights: Vec<i64>, capacity: i64) -> Result<Self> {
        if weights.is_empty() {
            return Err(CoverError::EmptyRow);
        }
        if capacity <= 0 {
            return Err(CoverError::NonPositiveCapacity(capacity));
        }
        for (index, &weight) in weights.iter().enumerate() {
            if weight <= 0 {
                return Err(CoverError::NonPositiveWeight { index, weight });
            }
            if weight > capacity {
                return Err(CoverError::ItemExceedsCapacity { index, weight, capacity });
            }
        }
        Ok(Self { weights, capacity })
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn weight(&self, j: usize) -> i64 {
        self.weights[j]
    }

    pub fn capacity(&self) -> i64 {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Total weight of `subset`, validating indices and rejecting duplicates.
    pub fn subset_weight(&self, subset: &[usize]) -> Result<i64> {
        let mut seen = vec![false; self.len()];
        let mut total = 0i64;
        for &j in subset {
            if j >= self.len() {
                return Err(CoverError::IndexOutOfRange { index: j, len: self.len() });
            }
            if seen[j] {
                return Err(CoverError::DuplicateIndex(j));
            }
            seen[j] = true;
            total += self.weights[j];
        }
        Ok(total)
    }

    /// Whether the 0-1 point `x` (as a bitmask over items) fits.
    pub fn fits(&self, x: &[bool]) -> bool {
        let w: i64 = self.weights.iter().zip(x).filter(|(_, &on)| on).map(|(a, _)| *a).sum();
        w <= self.capacity
    }
}

impl fmt::Display for KnapsackRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .weights
            .iter()
            .enumerate()
            .map(|(j, a)| format!("{a}x{}", j + 1))
            .collect();
        write!(f, "{} <= {}", terms.join(" + "), self.capacity)
    }
}

/// Why a subset fails to be a minimal cover.
fn check_minimal_cover(row: &KnapsackRow, subset: &[usize]) -> Result<()> {
    let total = row.subset_weight(subset)?;
    if total <= row.capacity() {
        return Err(CoverError::NotACover { weight: total, capacity: row.capacity() });
    }
    for &j in subset {
        let remaining = total - row.weight(j);
        if remaining > row.capacity() {
            return Err(CoverError::NotMinimal { witness: j, remaining, capacity: row.capacity() });
        }
    }
    Ok(())
}

/// True iff `subset` overweights the knapsack and every one-item-removed
/// subset fits. Index errors are reported, not folded into `false`.
pub fn is_minimal_cover(row: &KnapsackRow, subset: &[usize]) -> Result<bool> {
    match check_minimal_cover(row, subset) {
        Ok(()) => Ok(true),
        Err(CoverError::NotACover { .. }) | Err(CoverError::NotMinimal { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

/// Half-open-left interval `(lo, hi]` with integer endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: i64,
    pub hi: i64,
}

impl Interval {
    pub fn contains(&self, z: Rational) -> bool {
        Rational::from(self.lo as i128) < z && z <= Rational::from(self.hi as i128)
    }

    pub fn contains_int(&self, z: i64) -> bool {
        self.lo < z && z <= self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    pub fn len(&self) -> i64 {
        (self.hi - self.lo).max(0)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}]", self.lo, self.hi)
    }
}

/// Where a point of `[0, b]` falls in the flat/sloped partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Location {
    Zero,
    /// Flat interval `F_h`, `h = 0..t-1`.
    Flat(usize),
    /// Sloped interval `S_h`, `h = 1..t-1`.
    Sloped(usize),
}

/// The flat intervals `F_h` and sloped intervals `S_h` of a cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalPartition {
    /// `F_0 .. F_{t-1}`.
    pub f_intervals: Vec<Interval>,
    /// `S_1 .. S_{t-1}` as `(h, S_h)`; only nonempty ones are listed.
    pub s_intervals: Vec<(usize, Interval)>,
}

impl IntervalPartition {
    pub fn flat(&self, h: usize) -> Interval {
        self.f_intervals[h]
    }

    pub fn sloped(&self, h: usize) -> Option<Interval> {
        self.s_intervals.iter().find(|(k, _)| *k == h).map(|(_, s)| *s)
    }

    /// Locates `z` in `[0, b]`; `None` outside that range.
    pub fn locate(&self, z: Rational) -> Option<Location> {
        if z == Rational::from(0) {
            return Some(Location::Zero);
        }
        if let Some(h) = self.f_intervals.iter().position(|iv| iv.contains(z)) {
            return Some(Location::Flat(h));
        }
        self.s_intervals
            .iter()
            .find(|(_, iv)| iv.contains(z))
            .map(|(h, _)| Location::Sloped(*h))
    }

    /// Every interval endpoint in increasing order, starting at 0.
    pub fn breakpoints(&self) -> Vec<i64> {
        let mut pts = vec![0];
        for iv in self.f_intervals.iter().chain(self.s_intervals.iter().map(|(_, s)| s)) {
            pts.push(iv.lo);
            pts.push(iv.hi);
        }
        pts.sort_unstable();
        pts.dedup();
        pts
    }
}

/// A validated minimal cover with the quantities used by the lifting functions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverParams {
    row: KnapsackRow,
    /// Original indices, heaviest first.
    order: Vec<usize>,
    mu: Vec<i64>,
    lambda: i64,
    rho: Vec<i64>,
}

impl CoverParams {
    pub fn new(row: &KnapsackRow, cover: &[usize]) -> Result<Self> {
        check_minimal_cover(row, cover)?;
        let mut order = cover.to_vec();
        order.sort_by(|&i, &j| row.weight(j).cmp(&row.weight(i)).then(i.cmp(&j)));
        let t = order.len();
        let mut mu = Vec::with_capacity(t + 1);
        mu.push(0);
        for &j in &order {
            mu.push(mu.last().unwrap() + row.weight(j));
        }
        let lambda = mu[t] - row.capacity();
        let a1 = row.weight(order[0]);
        let rho = (0..t)
            .map(|h| if h == 0 { lambda } else { (row.weight(order[h]) - (a1 - lambda)).max(0) })
            .collect();
        Ok(Self { row: row.clone(), order, mu, lambda, rho })
    }

    pub fn row(&self) -> &KnapsackRow {
        &self.row
    }

    /// Cover members in descending-weight order (original indices).
    pub fn cover_by_weight(&self) -> &[usize] {
        &self.order
    }

    /// Cover members in ascending index order.
    pub fn cover(&self) -> Vec<usize> {
        let mut c = self.order.clone();
        c.sort_unstable();
        c
    }

    pub fn contains(&self, j: usize) -> bool {
        self.order.contains(&j)
    }

    pub fn t(&self) -> usize {
        self.order.len()
    }

    /// `mu_h` for `h = 0..=t`.
    pub fn mu(&self, h: usize) -> i64 {
        self.mu[h]
    }

    pub fn mus(&self) -> &[i64] {
        &self.mu
    }

    pub fn lambda(&self) -> i64 {
        self.lambda
    }

    /// `rho_h` for `h = 0..t-1`; zero beyond.
    pub fn rho(&self, h: usize) -> i64 {
        self.rho.get(h).copied().unwrap_or(0)
    }

    pub fn rhos(&self) -> &[i64] {
        &self.rho
    }

    pub fn rho1(&self) -> i64 {
        self.rho(1)
    }

    /// Sorted cover weight `a_h` (1-based, heaviest is `a_1`).
    pub fn sorted_weight(&self, h: usize) -> i64 {
        self.row.weight(self.order[h - 1])
    }

    /// `mu_1 - lambda >= rho_1`: the condition under which every `g_k` is superadditive.
    pub fn admits_all_slopes(&self) -> bool {
        self.mu[1] - self.lambda >= self.rho1()
    }

    /// Right end of `S_h`, i.e. `mu_h - lambda + rho_h`.
    pub fn sloped_end(&self, h: usize) -> i64 {
        self.mu[h] - self.lambda + self.rho(h)
    }

    pub fn interval_partition(&self) -> IntervalPartition {
        let t = self.t();
        let f_intervals = (0..t)
            .map(|h| Interval { lo: self.sloped_end(h), hi: self.mu[h + 1] - self.lambda })
            .collect();
        let s_intervals = (1..t)
            .filter(|&h| self.rho(h) > 0)
            .map(|h| (h, Interval { lo: self.mu[h] - self.lambda, hi: self.sloped_end(h) }))
            .collect();
        IntervalPartition { f_intervals, s_intervals }
    }

    fn check_domain(&self, z: Rational) -> Result<()> {
        let b = Rational::from(self.row.capacity() as i128);
        if z < Rational::from(0) || z > b {
            return Err(CoverError::OutOfDomain { value: z.to_string(), capacity: self.row.capacity() });
        }
        Ok(())
    }

    /// Closed form of the lifting function: the largest `h` with `mu_h - lambda < z`.
    pub fn lifting_fn(&self, z: Rational) -> Result<usize> {
        self.check_domain(z)?;
        let t = self.t();
        let mut h = 0;
        while h + 1 < t && Rational::from((self.mu[h + 1] - self.lambda) as i128) < z {
            h += 1;
        }
        Ok(h)
    }

    /// `h(j)`: the index with `mu_h <= a <= mu_{h+1} - 1`.
    pub fn weight_level(&self, a: i64) -> usize {
        let mut h = 0;
        while h + 1 < self.mu.len() && self.mu[h + 1] <= a {
            h += 1;
        }
        h
    }
}

/// Exact lifting function `f(z)` for a validated cover.
pub fn lifting_fn_f(params: &CoverParams, z: Rational) -> Result<usize> {
    params.lifting_fn(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> CoverParams {
        let row = KnapsackRow::new(vec![16, 14, 13, 9], 44).unwrap();
        CoverParams::new(&row, &[0, 1, 2, 3]).unwrap()
    }

    fn q(n: i128) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn example_one_parameters() {
        let p = example1();
        assert_eq!(p.mus(), &[0, 16, 30, 43, 52]);
        assert_eq!(p.lambda(), 8);
        assert_eq!(p.rhos(), &[8, 6, 5, 1]);
        assert_eq!(p.mu(4) - p.lambda(), 44);
        assert!(p.admits_all_slopes());
    }

    #[test]
    fn appendix_row_parameters() {
        let row = KnapsackRow::new(vec![112, 108, 107, 106, 102, 84, 82], 268).unwrap();
        let p = CoverParams::new(&row, &[1, 2, 3]).unwrap();
        assert_eq!(p.mus(), &[0, 108, 215, 321]);
        assert_eq!(p.lambda(), 53);
        assert_eq!(p.rhos(), &[53, 52, 51]);
    }

    #[test]
    fn minimal_cover_detection() {
        let row = KnapsackRow::new(vec![16, 14, 13, 9, 9, 10, 11, 23], 44).unwrap();
        assert!(is_minimal_cover(&row, &[0, 1, 2, 3]).unwrap());
        assert!(!is_minimal_cover(&row, &[0, 1]).unwrap());
        let row = KnapsackRow::new(vec![10, 9, 8, 7, 6, 6, 5, 4], 26).unwrap();
        assert!(is_minimal_cover(&row, &[0, 1, 2]).unwrap());
        // cover but not minimal: dropping 4 still overweights
        assert!(!is_minimal_cover(&row, &[0, 1, 2, 7]).unwrap());
        assert!(matches!(
            is_minimal_cover(&row, &[0, 8]),
            Err(CoverError::IndexOutOfRange { index: 8, .. })
        ));
    }

    #[test]
    fn cover_params_reports_failure_kind() {
        let row = KnapsackRow::new(vec![16, 14, 13, 9], 44).unwrap();
        assert!(matches!(CoverParams::new(&row, &[0, 1]), Err(CoverError::NotACover { .. })));
        let row = KnapsackRow::new(vec![16, 14, 13, 9, 1], 44).unwrap();
        assert!(matches!(
            CoverParams::new(&row, &[0, 1, 2, 3, 4]),
            Err(CoverError::NotMinimal { witness: 4, .. })
        ));
    }

    #[test]
    fn ties_break_by_index() {
        let row = KnapsackRow::new(vec![5, 7, 5, 7], 20).unwrap();
        let p = CoverParams::new(&row, &[3, 2, 1, 0]).unwrap();
        assert_eq!(p.cover_by_weight(), &[1, 3, 0, 2]);
        assert_eq!(p.cover(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn lifting_fn_examples() {
        let p = example1();
        assert_eq!(p.lifting_fn(q(5)).unwrap(), 0);
        assert_eq!(p.lifting_fn(q(8)).unwrap(), 0);
        assert_eq!(p.lifting_fn(Rational::new(17, 2)).unwrap(), 1);
        assert_eq!(p.lifting_fn(q(23)).unwrap(), 2);
        assert_eq!(p.lifting_fn(q(36)).unwrap(), 3);
        assert_eq!(p.lifting_fn(q(44)).unwrap(), 3);
        assert_eq!(p.lifting_fn(q(0)).unwrap(), 0);
        assert!(p.lifting_fn(q(45)).is_err());
        assert!(p.lifting_fn(q(-1)).is_err());
    }

    #[test]
    fn partition_of_example_one() {
        let part = example1().interval_partition();
        let iv = |lo, hi| Interval { lo, hi };
        assert_eq!(part.f_intervals, vec![iv(0, 8), iv(14, 22), iv(27, 35), iv(36, 44)]);
        assert_eq!(part.s_intervals, vec![(1, iv(8, 14)), (2, iv(22, 27)), (3, iv(35, 36))]);
        assert_eq!(part.locate(q(23)), Some(Location::Sloped(2)));
        assert_eq!(part.locate(q(14)), Some(Location::Sloped(1)));
        assert_eq!(part.locate(Rational::new(29, 2)), Some(Location::Flat(1)));
        assert_eq!(part.locate(q(0)), Some(Location::Zero));
        assert_eq!(part.locate(q(45)), None);
    }

    #[test]
    fn no_sloped_intervals_when_rho_vanishes() {
        // a_1 - lambda >= every other weight, so rho_h = 0 for h >= 1
        let row = KnapsackRow::new(vec![10, 3, 3], 15).unwrap();
        let p = CoverParams::new(&row, &[0, 1, 2]).unwrap();
        assert_eq!(p.rho1(), 0);
        assert!(p.interval_partition().s_intervals.is_empty());
    }

    #[test]
    fn row_rejects_bad_input() {
        assert!(KnapsackRow::new(vec![], 3).is_err());
        assert!(KnapsackRow::new(vec![1, 0], 3).is_err());
        assert!(KnapsackRow::new(vec![4], 3).is_err());
        assert!(KnapsackRow::new(vec![1], 0).is_err());
    }
}
