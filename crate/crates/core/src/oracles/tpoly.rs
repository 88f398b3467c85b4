//! The polyhedron `T` whose vertices are exactly the facet-defining
//! sequence-independent liftings of a minimal cover.
//!
//! Each non-cover item gets the level `h(j)` with `mu_h <= a_j < mu_{h+1}`.
//! Items whose weight lies above `mu_{h+1} - lambda` form `J`, and for every
//! nonempty `Q` in `J` that fits in the knapsack there is a row
//! `sum_{j in Q} delta_j <= f(sum_{j in Q} a_j) - sum_{j in Q} h(j)`.
//! A lifted cut with coefficients `alpha` is a facet exactly when
//! `alpha_j = h(j)` off `J` and `alpha_J - h(J)` is a vertex of `T`.

use num_traits::{One, Zero};

use crate::error::{CoverError, Result};
use crate::knapsack::CoverParams;
use crate::lifting::LiftedCut;
use crate::oracles::enumerate::EchelonBasis;
use crate::Rational;

pub const MAX_T_ITEMS: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TPolyhedron {
    /// Items of `J`, ascending.
    pub j_set: Vec<usize>,
    /// `h(j)` for each item of `J`.
    pub levels: Vec<usize>,
    /// Each `Q` as positions into `j_set`.
    pub q_family: Vec<Vec<usize>>,
    /// Right-hand side for each `Q`.
    pub constraint_rhs: Vec<i64>,
}

/// Non-cover items with `h(j) = level` but weight at most `mu_{h+1} - lambda`.
pub fn fixed_items(params: &CoverParams) -> Vec<(usize, usize)> {
    let row = params.row();
    (0..row.len())
        .filter(|&j| !params.contains(j))
        .map(|j| (j, params.weight_level(row.weight(j))))
        .filter(|&(j, h)| row.weight(j) <= params.mu(h + 1) - params.lambda())
        .collect()
}

pub fn t_polyhedron(params: &CoverParams) -> Result<TPolyhedron> {
    let row = params.row();
    let j_set: Vec<usize> = (0..row.len())
        .filter(|&j| !params.contains(j))
        .filter(|&j| {
            let h = params.weight_level(row.weight(j));
            row.weight(j) > params.mu(h + 1) - params.lambda()
        })
        .collect();
    if j_set.len() > MAX_T_ITEMS {
        return Err(CoverError::BudgetExceeded { what: "|J|", got: j_set.len(), limit: MAX_T_ITEMS });
    }
    let levels: Vec<usize> = j_set.iter().map(|&j| params.weight_level(row.weight(j))).collect();
    let mut q_family = Vec::new();
    let mut constraint_rhs = Vec::new();
    for mask in 1u32..(1 << j_set.len()) {
        let q: Vec<usize> = (0..j_set.len()).filter(|&i| mask >> i & 1 == 1).collect();
        let weight: i64 = q.iter().map(|&i| row.weight(j_set[i])).sum();
        if weight > row.capacity() {
            continue;
        }
        let f = params.lifting_fn(Rational::from(weight as i128))? as i64;
        let h: i64 = q.iter().map(|&i| levels[i] as i64).sum();
        q_family.push(q);
        constraint_rhs.push(f - h);
    }
    Ok(TPolyhedron { j_set, levels, q_family, constraint_rhs })
}

/// Feasible for every row of `T` and tight on `|J|` linearly independent rows.
pub fn t_vertex_check(tp: &TPolyhedron, delta: &[Rational]) -> Result<bool> {
    let n = tp.j_set.len();
    if delta.len() != n {
        return Err(CoverError::DimensionMismatch { expected: n, got: delta.len() });
    }
    let mut basis = EchelonBasis::default();
    for (q, &rhs) in tp.q_family.iter().zip(&tp.constraint_rhs) {
        let lhs: Rational = q.iter().map(|&i| delta[i]).sum();
        let rhs = Rational::from(rhs as i128);
        if lhs > rhs {
            return Ok(false);
        }
        if lhs == rhs && basis.rank() < n {
            let mut v = vec![Rational::zero(); n];
            for &i in q {
                v[i] = Rational::one();
            }
            basis.insert(v);
        }
    }
    Ok(basis.rank() == n)
}

/// Facet test for a lifted cover cut through the vertex characterization.
pub fn t_facet_check(params: &CoverParams, cut: &LiftedCut) -> Result<bool> {
    let row = params.row();
    if cut.len() != row.len() {
        return Err(CoverError::DimensionMismatch { expected: row.len(), got: cut.len() });
    }
    let cover_ok = (0..row.len()).filter(|&j| params.contains(j)).all(|j| cut.coefficients[j].is_one())
        && cut.rhs == Rational::from(params.t() as i128 - 1);
    if !cover_ok {
        return Ok(false);
    }
    if fixed_items(params).iter().any(|&(j, h)| cut.coefficients[j] != Rational::from(h as i128)) {
        return Ok(false);
    }
    let tp = t_polyhedron(params)?;
    let delta: Vec<Rational> = tp
        .j_set
        .iter()
        .zip(&tp.levels)
        .map(|(&j, &h)| cut.coefficients[j] - Rational::from(h as i128))
        .collect();
    t_vertex_check(&tp, &delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knapsack::KnapsackRow;
    use crate::lifting::{lift_gns, lift_pc};

    fn params(extra: &[i64]) -> CoverParams {
        let mut w = vec![16, 14, 13, 9];
        w.extend_from_slice(extra);
        CoverParams::new(&KnapsackRow::new(w, 44).unwrap(), &[0, 1, 2, 3]).unwrap()
    }

    #[test]
    fn facet_example_half_vector_is_vertex() {
        let p = params(&[9, 10, 11, 23]);
        let tp = t_polyhedron(&p).unwrap();
        assert_eq!(tp.j_set, vec![4, 5, 6, 7]);
        let half = vec![Rational::new(1, 2); 4];
        assert!(t_vertex_check(&tp, &half).unwrap());
        assert!(t_facet_check(&p, &lift_pc(&p)).unwrap());
        assert!(!t_facet_check(&p, &lift_gns(&p)).unwrap());
    }

    #[test]
    fn infeasible_delta_is_not_vertex() {
        let p = params(&[9, 10, 11, 23]);
        let tp = t_polyhedron(&p).unwrap();
        let mut delta = vec![Rational::new(1, 2); 4];
        delta[0] = Rational::from(2);
        assert!(!t_vertex_check(&tp, &delta).unwrap());
    }

    #[test]
    fn single_item_polyhedron() {
        let p = params(&[9]);
        let tp = t_polyhedron(&p).unwrap();
        assert_eq!(tp.j_set, vec![4]);
        // f(9) - h = 1 - 0
        assert_eq!(tp.constraint_rhs, vec![1]);
        assert!(t_vertex_check(&tp, &[Rational::one()]).unwrap());
        assert!(!t_vertex_check(&tp, &[Rational::new(1, 2)]).unwrap());
    }
}
