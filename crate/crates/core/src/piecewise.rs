//! Piecewise-linear functions on `[0, E]` with left-open, right-closed pieces.
//!
//! A piece spans `(p_i, p_{i+1}]` and is linear from its right-limit at
//! `p_i` to its value at `p_{i+1}`, so the function is left-continuous on
//! `(0, E]` and may jump to the right of any knot. The value at zero is
//! stored separately.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{ToPrimitive, Zero};

use crate::error::{CoverError, Result};
use crate::Rational;

/// Ordered field used by the piecewise machinery: exact rationals or `f64`.
pub trait Scalar:
    Copy
    + PartialOrd
    + Debug
    + Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(self) -> f64;
    /// Slack allowed when deciding that a violation is real.
    fn violation_tolerance() -> Self;
}

impl Scalar for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn from_i64(v: i64) -> Self {
        Rational::from(v as i128)
    }
    fn to_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
    fn violation_tolerance() -> Self {
        <Rational as Zero>::zero()
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn violation_tolerance() -> Self {
        1e-9
    }
}

pub(crate) fn max_s<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}

pub(crate) fn min_s<S: Scalar>(a: S, b: S) -> S {
    if b < a {
        b
    } else {
        a
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Piece<S> {
    /// Limit of the function as `z` approaches the left knot from the right.
    pub left_limit: S,
    /// Value at the right knot.
    pub right_value: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseLinear<S> {
    knots: Vec<S>,
    at_zero: S,
    pieces: Vec<Piece<S>>,
}

impl<S: Scalar> PiecewiseLinear<S> {
    pub fn new(knots: Vec<S>, at_zero: S, pieces: Vec<Piece<S>>) -> Result<Self> {
        if knots.len() < 2 || pieces.len() + 1 != knots.len() {
            return Err(CoverError::InvalidPiecewise(format!(
                "{} knots for {} pieces",
                knots.len(),
                pieces.len()
            )));
        }
        if knots[0] != S::zero() {
            return Err(CoverError::InvalidPiecewise("first knot must be 0".into()));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(CoverError::InvalidPiecewise("knots must be strictly increasing".into()));
        }
        Ok(Self { knots, at_zero, pieces })
    }

    pub fn knots(&self) -> &[S] {
        &self.knots
    }

    pub fn pieces(&self) -> &[Piece<S>] {
        &self.pieces
    }

    pub fn at_zero(&self) -> S {
        self.at_zero
    }

    pub fn domain_end(&self) -> S {
        *self.knots.last().unwrap()
    }

    fn interp(&self, i: usize, z: S) -> S {
        let (p0, p1) = (self.knots[i], self.knots[i + 1]);
        let Piece { left_limit, right_value } = self.pieces[i];
        if z == p1 {
            return right_value;
        }
        left_limit + (right_value - left_limit) * (z - p0) / (p1 - p0)
    }

    /// `g(z)`, or `None` outside `[0, E]`.
    pub fn eval(&self, z: S) -> Option<S> {
        if z < S::zero() || z > self.domain_end() {
            return None;
        }
        if z == S::zero() {
            return Some(self.at_zero);
        }
        let idx = self.knots.partition_point(|k| *k < z);
        Some(self.interp(idx - 1, z))
    }

    /// Right limit `g(z+)` for `z` in `[0, E)`.
    pub fn right_limit(&self, z: S) -> Option<S> {
        if z < S::zero() || z >= self.domain_end() {
            return None;
        }
        let idx = self.knots.partition_point(|k| *k <= z);
        let i = idx - 1;
        if z == self.knots[i] {
            Some(self.pieces[i].left_limit)
        } else {
            Some(self.interp(i, z))
        }
    }

    /// Value at knot `i`.
    pub fn knot_value(&self, i: usize) -> S {
        if i == 0 {
            self.at_zero
        } else {
            self.pieces[i - 1].right_value
        }
    }
}

/// Incremental construction from consecutive segments.
#[derive(Clone, Debug)]
pub struct PiecewiseBuilder<S> {
    knots: Vec<S>,
    at_zero: S,
    pieces: Vec<Piece<S>>,
}

impl<S: Scalar> PiecewiseBuilder<S> {
    pub fn new(at_zero: S) -> Self {
        Self { knots: vec![S::zero()], at_zero, pieces: Vec::new() }
    }

    /// Appends the piece `(last_knot, end]`; zero-length pieces are dropped.
    pub fn push(&mut self, end: S, left_limit: S, right_value: S) -> &mut Self {
        if end > *self.knots.last().unwrap() {
            self.knots.push(end);
            self.pieces.push(Piece { left_limit, right_value });
        }
        self
    }

    pub fn build(self) -> Result<PiecewiseLinear<S>> {
        PiecewiseLinear::new(self.knots, self.at_zero, self.pieces)
    }
}
