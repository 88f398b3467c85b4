//! Dense dual simplex for `max c.x  s.t.  A x <= b,  l <= x <= u`.
//!
//! The solver works in active-set form: a basis is a set of `n` constraints
//! (rows, upper bounds or lower bounds) with independent normals, the
//! primal point is the intersection of their hyperplanes, and the duals are
//! the multipliers expressing `c` in those normals. Starting each variable at
//! the bound its objective favours gives nonnegative duals, so no phase one is
//! needed. Each iteration brings in the most violated constraint and drops
//! the basis member chosen by the dual ratio test. Bound changes and added
//! rows leave a basis dual feasible, which makes warm starts trivial.

use thiserror::Error;

const FEAS_TOL: f64 = 1e-9;
const FINAL_TOL: f64 = 1e-7;
const PIVOT_TOL: f64 = 1e-9;
const DUALITY_TOL: f64 = 1e-6;
const REFACTOR_EVERY: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("malformed model: {0}")]
    InvalidModel(String),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

/// Maximization model with `<=` rows and finite bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct LpModel {
    pub objective: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl LpModel {
    /// Model with no rows and every variable in `[0, 1]`.
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self { objective, rows: Vec::new(), rhs: Vec::new(), lower: vec![0.0; n], upper: vec![1.0; n] }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn add_row(&mut self, coefficients: Vec<f64>, rhs: f64) -> usize {
        self.rows.push(coefficients);
        self.rhs.push(rhs);
        self.rows.len() - 1
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        let bad = |msg: String| Err(LpError::InvalidModel(msg));
        if self.lower.len() != n || self.upper.len() != n {
            return bad("bound vectors must match the number of variables".into());
        }
        if self.rows.len() != self.rhs.len() {
            return bad("one right-hand side per row".into());
        }
        if let Some(i) = self.rows.iter().position(|r| r.len() != n) {
            return bad(format!("row {i} has the wrong length"));
        }
        for j in 0..n {
            if !(self.lower[j].is_finite() && self.upper[j].is_finite() && self.lower[j] <= self.upper[j]) {
                return bad(format!("variable {j} has bounds [{}, {}]", self.lower[j], self.upper[j]));
            }
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.objective) || !finite(&self.rhs) || !self.rows.iter().all(|r| finite(r)) {
            return bad("non-finite data".into());
        }
        Ok(())
    }
}

/// A constraint that can sit in the basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstraintId {
    Upper(usize),
    Lower(usize),
    Row(usize),
}

impl ConstraintId {
    /// Position in the fixed order used by the anti-cycling rule.
    fn rank(self, n: usize) -> usize {
        match self {
            ConstraintId::Upper(j) => j,
            ConstraintId::Lower(j) => n + j,
            ConstraintId::Row(i) => 2 * n + i,
        }
    }
}

/// Basis of an optimal solve, reusable as a warm start.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis(pub Vec<ConstraintId>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    pub point: Vec<f64>,
    pub objective_value: f64,
    pub iterations: usize,
    pub basis: Option<Basis>,
}

impl LpSolution {
    fn infeasible(iterations: usize) -> Self {
        Self { status: LpStatus::Infeasible, point: Vec::new(), objective_value: f64::NEG_INFINITY, iterations, basis: None }
    }
}

pub fn solve_lp(model: &LpModel) -> Result<LpSolution, LpError> {
    solve_lp_warm(model, None)
}

/// Solves from `warm` when it is still a valid dual-feasible basis, otherwise cold.
pub fn solve_lp_warm(model: &LpModel, warm: Option<&Basis>) -> Result<LpSolution, LpError> {
    model.validate()?;
    let mut solver = DualSimplex::new(model);
    if let Some(basis) = warm {
        if solver.install(&basis.0) {
            return solver.run();
        }
        solver = DualSimplex::new(model);
    }
    solver.cold_start();
    solver.run()
}

struct DualSimplex<'a> {
    model: &'a LpModel,
    n: usize,
    /// Rows scaled to unit max-norm; all-zero rows are dropped.
    rows: Vec<(usize, Vec<f64>, f64)>,
    basis: Vec<ConstraintId>,
    /// Inverse of the matrix whose rows are the basis normals.
    binv: Vec<Vec<f64>>,
    iterations: usize,
}

impl<'a> DualSimplex<'a> {
    fn new(model: &'a LpModel) -> Self {
        let n = model.num_vars();
        let rows = model
            .rows
            .iter()
            .zip(&model.rhs)
            .enumerate()
            .filter_map(|(i, (row, &b))| {
                let scale = row.iter().fold(0.0f64, |m, a| m.max(a.abs()));
                (scale > 0.0).then(|| (i, row.iter().map(|a| a / scale).collect(), b / scale))
            })
            .collect();
        Self { model, n, rows, basis: Vec::new(), binv: Vec::new(), iterations: 0 }
    }

    fn row_index(&self, i: usize) -> Option<usize> {
        self.rows.binary_search_by_key(&i, |r| r.0).ok()
    }

    fn normal(&self, id: ConstraintId) -> Vec<f64> {
        let mut g = vec![0.0; self.n];
        match id {
            ConstraintId::Upper(j) => g[j] = 1.0,
            ConstraintId::Lower(j) => g[j] = -1.0,
            ConstraintId::Row(i) => g.clone_from(&self.rows[self.row_index(i).expect("row in basis")].1),
        }
        g
    }

    fn rhs_of(&self, id: ConstraintId) -> f64 {
        match id {
            ConstraintId::Upper(j) => self.model.upper[j],
            ConstraintId::Lower(j) => -self.model.lower[j],
            ConstraintId::Row(i) => self.rows[self.row_index(i).expect("row in basis")].2,
        }
    }

    /// `g . binv[:, k]` for every `k`.
    fn alpha(&self, id: ConstraintId) -> Vec<f64> {
        match id {
            ConstraintId::Upper(j) => self.binv[j].clone(),
            ConstraintId::Lower(j) => self.binv[j].iter().map(|v| -v).collect(),
            ConstraintId::Row(i) => {
                let g = &self.rows[self.row_index(i).expect("row exists")].1;
                let mut out = vec![0.0; self.n];
                for (r, &gr) in g.iter().enumerate() {
                    if gr != 0.0 {
                        for (o, b) in out.iter_mut().zip(&self.binv[r]) {
                            *o += gr * b;
                        }
                    }
                }
                out
            }
        }
    }

    fn cold_start(&mut self) {
        self.basis = (0..self.n)
            .map(|j| if self.model.objective[j] > 0.0 { ConstraintId::Upper(j) } else { ConstraintId::Lower(j) })
            .collect();
        self.binv = (0..self.n)
            .map(|r| {
                let mut row = vec![0.0; self.n];
                row[r] = if matches!(self.basis[r], ConstraintId::Upper(_)) { 1.0 } else { -1.0 };
                row
            })
            .collect();
    }

    /// Adopts `basis` if it is well formed, invertible and dual feasible.
    fn install(&mut self, basis: &[ConstraintId]) -> bool {
        let n = self.n;
        let valid_id = |id: &ConstraintId| match *id {
            ConstraintId::Upper(j) | ConstraintId::Lower(j) => j < n,
            ConstraintId::Row(i) => self.row_index(i).is_some(),
        };
        if basis.len() != n || !basis.iter().all(valid_id) {
            return false;
        }
        self.basis = basis.to_vec();
        self.refactor() && self.duals().iter().all(|&y| y >= -FEAS_TOL)
    }

    /// Recomputes the inverse from scratch; false if singular.
    fn refactor(&mut self) -> bool {
        let n = self.n;
        let mut a: Vec<Vec<f64>> = self.basis.iter().map(|&id| self.normal(id)).collect();
        let mut inv: Vec<Vec<f64>> = (0..n)
            .map(|r| {
                let mut row = vec![0.0; n];
                row[r] = 1.0;
                row
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
            if a[pivot][col].abs() < 1e-11 {
                return false;
            }
            a.swap(col, pivot);
            inv.swap(col, pivot);
            let p = a[col][col];
            for v in a[col].iter_mut() {
                *v /= p;
            }
            for v in inv[col].iter_mut() {
                *v /= p;
            }
            for r in 0..n {
                if r != col && a[r][col] != 0.0 {
                    let f = a[r][col];
                    let (pivot_a, pivot_inv) = (a[col].clone(), inv[col].clone());
                    for (v, pv) in a[r].iter_mut().zip(&pivot_a) {
                        *v -= f * pv;
                    }
                    for (v, pv) in inv[r].iter_mut().zip(&pivot_inv) {
                        *v -= f * pv;
                    }
                }
            }
        }
        // inv is the inverse of the row matrix A (A inv = I after elimination of
        // the rows); we store binv with binv[r][k] = (A^{-1})[r][k]
        self.binv = inv;
        true
    }

    fn primal(&self) -> Vec<f64> {
        let h: Vec<f64> = self.basis.iter().map(|&id| self.rhs_of(id)).collect();
        self.binv.iter().map(|row| row.iter().zip(&h).map(|(b, hk)| b * hk).sum()).collect()
    }

    fn duals(&self) -> Vec<f64> {
        let c = &self.model.objective;
        (0..self.n).map(|k| (0..self.n).map(|r| c[r] * self.binv[r][k]).sum()).collect()
    }

    /// Most violated constraint (or lowest-ranked violated one under Bland).
    fn pick_violated(&self, x: &[f64], bland: bool, tol: f64) -> Option<ConstraintId> {
        let mut best: Option<(f64, ConstraintId)> = None;
        let mut consider = |viol: f64, id: ConstraintId| {
            if viol > tol {
                let better = match best {
                    None => true,
                    Some((_, b)) if bland => id.rank(self.n) < b.rank(self.n),
                    Some((v, _)) => viol > v,
                };
                if better {
                    best = Some((viol, id));
                }
            }
        };
        for j in 0..self.n {
            consider(x[j] - self.model.upper[j], ConstraintId::Upper(j));
            consider(self.model.lower[j] - x[j], ConstraintId::Lower(j));
        }
        for (i, row, b) in &self.rows {
            let act: f64 = row.iter().zip(x).map(|(a, v)| a * v).sum();
            consider(act - b, ConstraintId::Row(*i));
        }
        best.map(|(_, id)| id)
    }

    fn run(mut self) -> Result<LpSolution, LpError> {
        let m = self.rows.len();
        // a zero row with negative rhs can never be satisfied
        if self.model.rows.iter().zip(&self.model.rhs).any(|(r, &b)| r.iter().all(|&a| a == 0.0) && b < -FINAL_TOL) {
            return Ok(LpSolution::infeasible(0));
        }
        let cap = 200 * (m + 2 * self.n) + 1000;
        let degenerate_limit = 3 * (m + self.n);
        let mut degenerate_run = 0;
        let mut since_refactor = 0;
        loop {
            if self.iterations > cap {
                return Err(LpError::NumericalFailure(format!("no convergence after {cap} iterations")));
            }
            let x = self.primal();
            let bland = degenerate_run >= degenerate_limit;
            let Some(entering) = self.pick_violated(&x, bland, FEAS_TOL) else {
                return self.finish(x);
            };
            let alpha = self.alpha(entering);
            let y = self.duals();
            let mut leave: Option<(f64, usize)> = None;
            for k in 0..self.n {
                if alpha[k] > PIVOT_TOL {
                    let ratio = y[k].max(0.0) / alpha[k];
                    let better = match leave {
                        None => true,
                        Some((r, kk)) => {
                            if (ratio - r).abs() <= 1e-12 {
                                if bland {
                                    self.basis[k].rank(self.n) < self.basis[kk].rank(self.n)
                                } else {
                                    alpha[k] > alpha[kk]
                                }
                            } else {
                                ratio < r
                            }
                        }
                    };
                    if better {
                        leave = Some((ratio, k));
                    }
                }
            }
            let Some((step, k)) = leave else {
                return Ok(LpSolution::infeasible(self.iterations));
            };
            degenerate_run = if step <= 1e-12 { degenerate_run + 1 } else { 0 };
            self.basis[k] = entering;
            self.iterations += 1;
            since_refactor += 1;
            if since_refactor >= REFACTOR_EVERY {
                since_refactor = 0;
                if !self.refactor() {
                    return Err(LpError::NumericalFailure("basis became singular".into()));
                }
            } else {
                let ak = alpha[k];
                let pivot_col: Vec<f64> = self.binv.iter().map(|row| row[k] / ak).collect();
                for (r, row) in self.binv.iter_mut().enumerate() {
                    for j in 0..row.len() {
                        if j != k && alpha[j] != 0.0 {
                            row[j] -= pivot_col[r] * alpha[j];
                        }
                    }
                    row[k] = pivot_col[r];
                }
            }
        }
    }

    fn finish(mut self, x: Vec<f64>) -> Result<LpSolution, LpError> {
        if !self.refactor() {
            return Err(LpError::NumericalFailure("final basis is singular".into()));
        }
        let x = {
            let fresh = self.primal();
            if fresh.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-6) { fresh } else { x }
        };
        if let Some(id) = self.pick_violated(&x, false, FINAL_TOL) {
            return Err(LpError::NumericalFailure(format!("final point violates {id:?}")));
        }
        let y = self.duals();
        if y.iter().any(|&v| v < -FINAL_TOL) {
            return Err(LpError::NumericalFailure("final duals are negative".into()));
        }
        let value: f64 = self.model.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
        let dual_value: f64 = self.basis.iter().zip(&y).map(|(&id, yk)| yk * self.rhs_of(id)).sum();
        if (value - dual_value).abs() > DUALITY_TOL * value.abs().max(1.0) {
            return Err(LpError::NumericalFailure(format!("duality gap {value} vs {dual_value}")));
        }
        let point = x
            .iter()
            .zip(self.model.lower.iter().zip(&self.model.upper))
            .map(|(v, (l, u))| v.clamp(*l, *u))
            .collect();
        Ok(LpSolution {
            status: LpStatus::Optimal,
            point,
            objective_value: value,
            iterations: self.iterations,
            basis: Some(Basis(self.basis)),
        })
    }
}
