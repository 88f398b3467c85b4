//! The generalized template `g~_k` built from two sequences of interval
//! lengths: flat lengths `u_i` and sloped lengths `v_i`.
//!
//! With `M_h = sum_{i <= h} (u_i + v_i)`, the function is `h` on
//! `(M_h, M_h + u_{h+1}]` and `h + 1 - w_k(M_{h+1} - z)` on
//! `(M_h + u_{h+1}, M_{h+1}]`, where `w_k(x) = k x + (1 - k v_1) / 2`.

use num_traits::{One, Signed, Zero};

use crate::error::{CoverError, Result};
use crate::oracles::superadd::{superadditivity_check, Counterexample};
use crate::piecewise::{PiecewiseBuilder, PiecewiseLinear};
use crate::Rational;

fn admissible(u: &[i64], v: &[i64], k: Rational, horizon: usize) -> Result<()> {
    let fail = |msg: String| Err(CoverError::PreconditionViolated(msg));
    if u.len() != v.len() {
        return Err(CoverError::DimensionMismatch { expected: u.len(), got: v.len() });
    }
    if horizon == 0 || horizon > u.len() {
        return fail(format!("horizon {horizon} outside 1..={}", u.len()));
    }
    if u.iter().chain(v).any(|&x| x < 0) {
        return fail("lengths must be non-negative".into());
    }
    if u.windows(2).any(|w| w[1] > w[0]) || v.windows(2).any(|w| w[1] > w[0]) {
        return fail("lengths must be non-increasing".into());
    }
    if v[0] <= 0 {
        return fail("v_1 must be positive".into());
    }
    if u.iter().zip(v).any(|(a, b)| a + b <= 0) {
        return fail("every u_i + v_i must be positive".into());
    }
    if k.is_negative() || k * Rational::from(v[0] as i128) > Rational::one() {
        return fail(format!("k = {k} outside [0, 1/{}]", v[0]));
    }
    Ok(())
}

/// `g~_k` on `[0, M_horizon]`.
pub fn tilde_g(u: &[i64], v: &[i64], k: Rational, horizon: usize) -> Result<PiecewiseLinear<Rational>> {
    admissible(u, v, k, horizon)?;
    let q = |n: i64| Rational::from(n as i128);
    let w = |x: Rational| k * x + (Rational::one() - k * q(v[0])) / q(2);
    let mut builder = PiecewiseBuilder::new(Rational::zero());
    let mut m = 0i64;
    for h in 0..horizon {
        let level = q(h as i64);
        builder.push(q(m + u[h]), level, level);
        let next = m + u[h] + v[h];
        builder.push(q(next), level + Rational::one() - w(q(v[h])), level + Rational::one() - w(Rational::zero()));
        m = next;
    }
    builder.build()
}

/// Builds `g~_k` and runs the exact superadditivity check on it.
pub fn tilde_g_check(u: &[i64], v: &[i64], k: Rational, horizon: usize) -> Result<Option<Counterexample<Rational>>> {
    let g = tilde_g(u, v, k, horizon)?;
    superadditivity_check(&g, g.domain_end())
}
