//! Exhaustive checks over the 0-1 points of a single knapsack row.

use num_traits::{One, Zero};

use crate::error::{CoverError, Result};
use crate::knapsack::KnapsackRow;
use crate::lifting::LiftedCut;
use crate::Rational;

pub const MAX_COVER_FOR_BRUTEFORCE: usize = 25;
pub const MAX_VALIDITY_VARS: usize = 22;
pub const MAX_FACET_VARS: usize = 14;
/// Table size limit, `(n + 1) (b + 1)`, for the dynamic-programming validity
/// check used on rows with more than `MAX_VALIDITY_VARS` items.
pub const MAX_VALIDITY_DP_CELLS: usize = 4_000_000;

/// `|C| - 1 - max { sum_{j in C} x_j : sum_{j in C} a_j x_j <= b - z }` by a
/// dynamic program for the lightest way to keep `k` cover items.
pub fn lifting_fn_bruteforce(row: &KnapsackRow, cover: &[usize], z: Rational) -> Result<usize> {
    if cover.len() > MAX_COVER_FOR_BRUTEFORCE {
        return Err(CoverError::BudgetExceeded {
            what: "cover size",
            got: cover.len(),
            limit: MAX_COVER_FOR_BRUTEFORCE,
        });
    }
    row.subset_weight(cover)?;
    let b = row.capacity();
    if z < Rational::zero() || z > Rational::from(b as i128) {
        return Err(CoverError::OutOfDomain { value: z.to_string(), capacity: b });
    }
    let room = (Rational::from(b as i128) - z).floor().to_integer() as i64;
    // lightest[k] = minimum weight of k cover items
    let mut lightest = vec![i64::MAX; cover.len() + 1];
    lightest[0] = 0;
    for &j in cover {
        let a = row.weight(j);
        for k in (1..lightest.len()).rev() {
            if lightest[k - 1] != i64::MAX {
                lightest[k] = lightest[k].min(lightest[k - 1] + a);
            }
        }
    }
    let kept = lightest.iter().rposition(|&w| w <= room).unwrap_or(0);
    Ok(cover.len().saturating_sub(1).saturating_sub(kept))
}

/// Outcome of a validity check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CutCheck {
    Valid,
    /// Lexicographically smallest feasible point violating the cut.
    Violated(Vec<bool>),
}

impl CutCheck {
    pub fn is_valid(&self) -> bool {
        matches!(self, CutCheck::Valid)
    }

    pub fn witness(&self) -> Option<&[bool]> {
        match self {
            CutCheck::Valid => None,
            CutCheck::Violated(x) => Some(x),
        }
    }
}

fn check_dims(row: &KnapsackRow, cut: &LiftedCut) -> Result<()> {
    if cut.len() != row.len() {
        return Err(CoverError::DimensionMismatch { expected: row.len(), got: cut.len() });
    }
    Ok(())
}

fn scaled(cut: &LiftedCut) -> Result<(Vec<i128>, i128)> {
    let denom = cut
        .coefficients
        .iter()
        .chain(std::iter::once(&cut.rhs))
        .try_fold(1i128, |acc, c| {
            let g = num_integer::gcd(acc, *c.denom());
            acc.checked_mul(c.denom() / g)
        })
        .ok_or_else(|| CoverError::PreconditionViolated("cut denominators too large".into()))?;
    let scale = |c: &Rational| c.numer().checked_mul(denom / c.denom());
    let coeffs = cut
        .coefficients
        .iter()
        .map(scale)
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| CoverError::PreconditionViolated("cut coefficients too large".into()))?;
    let rhs = scale(&cut.rhs).ok_or_else(|| CoverError::PreconditionViolated("cut rhs too large".into()))?;
    Ok((coeffs, rhs))
}

struct ValidityDfs<'a> {
    weights: &'a [i64],
    capacity: i64,
    coeffs: Vec<i128>,
    rhs: i128,
    /// Sum of positive coefficients from position `i` onward.
    positive_tail: Vec<i128>,
    x: Vec<bool>,
}

impl ValidityDfs<'_> {
    fn search(&mut self, i: usize, weight: i64, activity: i128) -> bool {
        if activity + self.positive_tail[i] <= self.rhs {
            return false;
        }
        if i == self.weights.len() {
            return true;
        }
        self.x[i] = false;
        if self.search(i + 1, weight, activity) {
            return true;
        }
        if weight + self.weights[i] <= self.capacity {
            self.x[i] = true;
            if self.search(i + 1, weight + self.weights[i], activity + self.coeffs[i]) {
                return true;
            }
            self.x[i] = false;
        }
        false
    }
}

/// Whether every feasible 0-1 point of `row` satisfies `cut`. The reported
/// witness is the lexicographically smallest violating point. Small rows are
/// searched depth-first; longer rows use a dynamic program over the capacity.
pub fn cut_valid(row: &KnapsackRow, cut: &LiftedCut) -> Result<CutCheck> {
    check_dims(row, cut)?;
    let (coeffs, rhs) = scaled(cut)?;
    let n = row.len();
    if n > MAX_VALIDITY_VARS {
        return cut_valid_dp(row, coeffs, rhs);
    }
    let mut positive_tail = vec![0i128; n + 1];
    for i in (0..n).rev() {
        positive_tail[i] = positive_tail[i + 1] + coeffs[i].max(0);
    }
    let mut dfs = ValidityDfs {
        weights: row.weights(),
        capacity: row.capacity(),
        coeffs,
        rhs,
        positive_tail,
        x: vec![false; n],
    };
    Ok(if dfs.search(0, 0, 0) { CutCheck::Violated(dfs.x) } else { CutCheck::Valid })
}

fn cut_valid_dp(row: &KnapsackRow, coeffs: Vec<i128>, rhs: i128) -> Result<CutCheck> {
    let n = row.len();
    let width = row.capacity() as usize + 1;
    let cells = (n + 1).saturating_mul(width);
    if cells > MAX_VALIDITY_DP_CELLS {
        return Err(CoverError::BudgetExceeded { what: "validity table cells", got: cells, limit: MAX_VALIDITY_DP_CELLS });
    }
    // best[i][c]: largest activity of items i.. within capacity c
    let mut best = vec![0i128; cells];
    for i in (0..n).rev() {
        let a = row.weight(i) as usize;
        for c in 0..width {
            let skip = best[(i + 1) * width + c];
            let take = if a <= c { coeffs[i] + best[(i + 1) * width + c - a] } else { i128::MIN };
            best[i * width + c] = skip.max(take);
        }
    }
    if best[width - 1] <= rhs {
        return Ok(CutCheck::Valid);
    }
    let mut x = vec![false; n];
    let mut room = width - 1;
    let mut activity = 0i128;
    for i in 0..n {
        if activity + best[(i + 1) * width + room] > rhs {
            continue;
        }
        x[i] = true;
        room -= row.weight(i) as usize;
        activity += coeffs[i];
    }
    Ok(CutCheck::Violated(x))
}

/// Tight points and affine rank of the face a cut induces on the knapsack polytope.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacetReport {
    pub is_valid: bool,
    pub tight_points: Vec<Vec<bool>>,
    /// Dimension of the affine hull of the tight points (0 when none are tight).
    pub affine_rank: usize,
    pub is_facet: bool,
}

/// Incremental row-echelon basis over the rationals.
#[derive(Clone, Debug, Default)]
pub(crate) struct EchelonBasis {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl EchelonBasis {
    pub(crate) fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds `v` if it is independent of the current rows.
    pub(crate) fn insert(&mut self, mut v: Vec<Rational>) -> bool {
        for (pivot, row) in &self.rows {
            if !v[*pivot].is_zero() {
                let factor = v[*pivot] / row[*pivot];
                for (x, r) in v.iter_mut().zip(row) {
                    *x -= factor * r;
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(pivot) => {
                self.rows.push((pivot, v));
                true
            }
            None => false,
        }
    }
}

/// Enumerates all feasible points (`n <= 14`), checks validity and computes
/// the affine rank of the tight points by exact elimination.
pub fn facet_report(row: &KnapsackRow, cut: &LiftedCut) -> Result<FacetReport> {
    check_dims(row, cut)?;
    let n = row.len();
    if n > MAX_FACET_VARS {
        return Err(CoverError::BudgetExceeded { what: "variables", got: n, limit: MAX_FACET_VARS });
    }
    let (coeffs, rhs) = scaled(cut)?;
    let mut is_valid = true;
    let mut tight_points = Vec::new();
    for mask in 0u32..(1 << n) {
        let x: Vec<bool> = (0..n).map(|j| mask >> j & 1 == 1).collect();
        if !row.fits(&x) {
            continue;
        }
        let activity: i128 = (0..n).filter(|&j| x[j]).map(|j| coeffs[j]).sum();
        if activity > rhs {
            is_valid = false;
        } else if activity == rhs {
            tight_points.push(x);
        }
    }
    tight_points.sort();
    let mut basis = EchelonBasis::default();
    if let Some(base) = tight_points.first() {
        for p in &tight_points[1..] {
            let diff = (0..n)
                .map(|j| Rational::from(p[j] as i128 - base[j] as i128))
                .collect();
            basis.insert(diff);
            if basis.rank() == n {
                break;
            }
        }
    }
    let affine_rank = basis.rank();
    let is_facet = is_valid && n >= 1 && affine_rank == n - 1;
    Ok(FacetReport { is_valid, tight_points, affine_rank, is_facet })
}

/// The bare cover inequality `sum_{j in C} x_j <= |C| - 1`.
pub fn cover_inequality(row: &KnapsackRow, cover: &[usize]) -> LiftedCut {
    let mut coefficients = vec![Rational::zero(); row.len()];
    for &j in cover {
        coefficients[j] = Rational::one();
    }
    let mut cut = LiftedCut::raw(coefficients, Rational::from(cover.len() as i128 - 1));
    cut.cover = cover.to_vec();
    cut.cover.sort_unstable();
    cut
}
