//! Sequence-independent lifting with the superadditive family `g_k`.
//!
//! For a cover with sloped intervals `S_h = (mu_h - lambda, E_h]`,
//! `E_h = mu_h - lambda + rho_h`, the family is
//!
//! ```text
//! g_k(0) = 0,   g_k(z) = h on F_h,   g_k(z) = h - w_k(E_h - z) on S_h,
//! w_k(x) = k x + (1 - k rho_1) / 2,   0 <= k <= 1 / rho_1.
//! ```
//!
//! `k = 0` is piecewise-constant (PC) lifting with half-integral
//! coefficients, `k = 1 / rho_1` is GNS lifting. All evaluation is exact;
//! only the tabulated `g_w` template used by the oracles is floating point.

use std::fmt;

use num_integer::Integer;
use num_traits::float::FloatCore;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{CoverError, Result};
use crate::knapsack::{CoverParams, KnapsackRow, Location};
use crate::piecewise::{PiecewiseBuilder, PiecewiseLinear};
use crate::Rational;

fn q(n: i64) -> Rational {
    Rational::from(n as i128)
}

/// Slope parameter of `w_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LiftParam {
    /// `k = 0`.
    Pc,
    /// `k = 1 / rho_1`.
    Gns,
    /// Arbitrary `k` in `[0, 1 / rho_1]`.
    Slope(Rational),
}

impl LiftParam {
    /// The numeric slope `k` for these cover parameters. When `rho_1 = 0` no
    /// sloped interval exists and GNS resolves to `0`.
    pub fn slope(&self, params: &CoverParams) -> Rational {
        match *self {
            LiftParam::Pc => Rational::zero(),
            LiftParam::Gns if params.rho1() == 0 => Rational::zero(),
            LiftParam::Gns => Rational::new(1, params.rho1() as i128),
            LiftParam::Slope(k) => k,
        }
    }

    /// Whether this parameter is the GNS slope `1 / rho_1`.
    pub fn is_gns(&self, params: &CoverParams) -> bool {
        match *self {
            LiftParam::Gns => true,
            LiftParam::Pc => params.rho1() == 0,
            LiftParam::Slope(k) => k * q(params.rho1()) == Rational::one() || params.rho1() == 0,
        }
    }

    fn validate(&self, params: &CoverParams) -> Result<Rational> {
        let k = self.slope(params);
        if k.is_negative() || (params.rho1() > 0 && k * q(params.rho1()) > Rational::one()) {
            return Err(CoverError::PreconditionViolated(format!(
                "slope {k} outside [0, 1/{}]",
                params.rho1()
            )));
        }
        if !params.admits_all_slopes() && !self.is_gns(params) {
            return Err(CoverError::PreconditionViolated(format!(
                "mu_1 - lambda = {} < rho_1 = {}: only the GNS slope is superadditive",
                params.mu(1) - params.lambda(),
                params.rho1()
            )));
        }
        Ok(k)
    }

    fn method(&self, params: &CoverParams) -> LiftMethod {
        match *self {
            LiftParam::Pc => LiftMethod::Pc,
            LiftParam::Gns => LiftMethod::Gns,
            LiftParam::Slope(k) if k.is_zero() => LiftMethod::Pc,
            LiftParam::Slope(_) if self.is_gns(params) => LiftMethod::Gns,
            LiftParam::Slope(k) => LiftMethod::GeneralK(k),
        }
    }
}

/// `w_k(x) = k x + (1 - k rho_1) / 2`.
fn w_k(k: Rational, rho1: i64, x: Rational) -> Rational {
    k * x + (Rational::one() - k * q(rho1)) / q(2)
}

fn g_k_unchecked(params: &CoverParams, k: Rational, z: Rational) -> Rational {
    match params.interval_partition().locate(z) {
        Some(Location::Zero) | None => Rational::zero(),
        Some(Location::Flat(h)) => q(h as i64),
        Some(Location::Sloped(h)) => q(h as i64) - w_k(k, params.rho1(), q(params.sloped_end(h)) - z),
    }
}

/// Exact `g_k(z)` for `z` in `[0, b]`.
pub fn eval_g_k(params: &CoverParams, param: LiftParam, z: Rational) -> Result<Rational> {
    let k = param.validate(params)?;
    let b = params.row().capacity();
    if z.is_negative() || z > q(b) {
        return Err(CoverError::OutOfDomain { value: z.to_string(), capacity: b });
    }
    Ok(g_k_unchecked(params, k, z))
}

/// `g_k` on `[0, b]` as an exact piecewise-linear function.
pub fn g_k_piecewise(params: &CoverParams, param: LiftParam) -> Result<PiecewiseLinear<Rational>> {
    let k = param.validate(params)?;
    let part = params.interval_partition();
    let mut builder = PiecewiseBuilder::new(Rational::zero());
    builder.push(q(part.flat(0).hi), Rational::zero(), Rational::zero());
    for h in 1..params.t() {
        let level = q(h as i64);
        if let Some(s) = part.sloped(h) {
            let rho_h = q(params.rho(h));
            builder.push(
                q(s.hi),
                level - w_k(k, params.rho1(), rho_h),
                level - w_k(k, params.rho1(), Rational::zero()),
            );
        }
        builder.push(q(part.flat(h).hi), level, level);
    }
    builder.build()
}

/// Which lifting function produced a cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LiftMethod {
    Pc,
    Gns,
    GeneralK(Rational),
    /// Arbitrary tabulated `w`; no validity guarantee.
    RawW,
}

impl fmt::Display for LiftMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LiftMethod::Pc => write!(f, "pc"),
            LiftMethod::Gns => write!(f, "gns"),
            LiftMethod::GeneralK(k) => write!(f, "k={k}"),
            LiftMethod::RawW => write!(f, "raw-w"),
        }
    }
}

/// `sum_j coefficients[j] x_j <= rhs` over the items of one knapsack row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LiftedCut {
    pub coefficients: Vec<Rational>,
    pub rhs: Rational,
    /// Cover members, ascending original indices.
    pub cover: Vec<usize>,
    pub method: LiftMethod,
}

impl LiftedCut {
    /// Plain cut with no cover attached (used for user-supplied inequalities).
    pub fn raw(coefficients: Vec<Rational>, rhs: Rational) -> Self {
        Self { coefficients, rhs, cover: Vec::new(), method: LiftMethod::RawW }
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coefficients.iter().zip(x).map(|(a, v)| a.to_f64().unwrap_or(f64::NAN) * v).sum()
    }

    /// `alpha . x - rhs` in floating point.
    pub fn violation(&self, x: &[f64]) -> f64 {
        self.activity(x) - self.rhs.to_f64().unwrap_or(f64::NAN)
    }

    /// Coefficient-wise `>=` with equal right-hand sides.
    pub fn dominates(&self, other: &LiftedCut) -> bool {
        self.rhs == other.rhs
            && self.len() == other.len()
            && self.coefficients.iter().zip(&other.coefficients).all(|(a, b)| a >= b)
    }

    /// Common denominator and the integer-scaled coefficients and rhs.
    pub fn scaled_integers(&self) -> (i128, Vec<i128>, i128) {
        let denom = self
            .coefficients
            .iter()
            .chain(std::iter::once(&self.rhs))
            .fold(1i128, |acc, c| acc.lcm(c.denom()));
        let scale = |c: &Rational| c.numer() * (denom / c.denom());
        (denom, self.coefficients.iter().map(scale).collect(), scale(&self.rhs))
    }
}

impl LiftedCut {
    /// Renders the cut with item `j` called `name(j)`; zero terms are skipped.
    pub fn format_with(&self, name: impl Fn(usize) -> String) -> String {
        let terms: Vec<String> = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| if c.is_one() { name(j) } else { format!("{c} {}", name(j)) })
            .collect();
        let lhs = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        format!("{lhs} <= {}", self.rhs)
    }
}

impl fmt::Display for LiftedCut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format_with(|j| format!("x{}", j + 1)))
    }
}

/// Lifts every non-cover variable of the row with `g_k`.
pub fn lift_with(params: &CoverParams, param: LiftParam) -> Result<LiftedCut> {
    let k = param.validate(params)?;
    let row = params.row();
    let coefficients = (0..row.len())
        .map(|j| if params.contains(j) { Rational::one() } else { g_k_unchecked(params, k, q(row.weight(j))) })
        .collect();
    Ok(LiftedCut {
        coefficients,
        rhs: q(params.t() as i64 - 1),
        cover: params.cover(),
        method: param.method(params),
    })
}

/// PC lifting; falls back to GNS when `mu_1 - lambda < rho_1`.
pub fn lift_pc(params: &CoverParams) -> LiftedCut {
    let param = if params.admits_all_slopes() { LiftParam::Pc } else { LiftParam::Gns };
    lift_with(params, param).expect("PC/GNS parameters are always admissible")
}

pub fn lift_gns(params: &CoverParams) -> LiftedCut {
    lift_with(params, LiftParam::Gns).expect("GNS is always admissible")
}

/// Both PC and GNS cuts, minus any cut the other dominates. Identical cuts
/// collapse to the PC one.
pub fn lift_smart(params: &CoverParams) -> Vec<LiftedCut> {
    if !params.admits_all_slopes() {
        return vec![lift_gns(params)];
    }
    let pc = lift_pc(params);
    let gns = lift_gns(params);
    if pc.dominates(&gns) {
        vec![pc]
    } else if gns.dominates(&pc) {
        vec![gns]
    } else {
        vec![pc, gns]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DominationVerdict {
    PcStrictlyDominates,
    Identical,
    GnsStrictlyDominates,
    Incomparable,
    /// No non-cover weight falls in a sloped interval.
    TriviallyEqual,
}

impl fmt::Display for DominationVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DominationVerdict::PcStrictlyDominates => "PC_STRICTLY_DOMINATES",
            DominationVerdict::Identical => "IDENTICAL",
            DominationVerdict::GnsStrictlyDominates => "GNS_STRICTLY_DOMINATES",
            DominationVerdict::Incomparable => "INCOMPARABLE",
            DominationVerdict::TriviallyEqual => "TRIVIALLY_EQUAL",
        };
        f.write_str(s)
    }
}

/// Non-cover items with a weight in some `S_h`, as `(j, h)`.
fn sloped_items(params: &CoverParams) -> Vec<(usize, usize)> {
    let part = params.interval_partition();
    let row = params.row();
    (0..row.len())
        .filter(|&j| !params.contains(j))
        .filter_map(|j| match part.locate(q(row.weight(j))) {
            Some(Location::Sloped(h)) => Some((j, h)),
            _ => None,
        })
        .collect()
}

/// PC versus GNS by the sloped-interval taxonomy. On `S_h` the two
/// coefficients meet at `E_h - rho_1/2`: PC is larger to the left of that
/// point and GNS to the right.
pub fn classify_domination(params: &CoverParams) -> Result<DominationVerdict> {
    if !params.admits_all_slopes() {
        return Err(CoverError::PreconditionViolated(
            "domination taxonomy needs mu_1 - lambda >= rho_1".into(),
        ));
    }
    let items = sloped_items(params);
    if items.is_empty() {
        return Ok(DominationVerdict::TriviallyEqual);
    }
    let half_rho1 = Rational::new(params.rho1() as i128, 2);
    let mut pc_side = 0;
    let mut on_threshold = 0;
    let mut gns_side = 0;
    for &(j, h) in &items {
        let a = q(params.row().weight(j));
        let threshold = q(params.sloped_end(h)) - half_rho1;
        let wide = q(params.rho(h)) > half_rho1;
        if !wide || a > threshold {
            gns_side += 1;
        } else if a < threshold {
            pc_side += 1;
        } else {
            on_threshold += 1;
        }
    }
    // items on the threshold get equal coefficients and never decide the verdict
    debug_assert_eq!(pc_side + on_threshold + gns_side, items.len());
    Ok(match (pc_side > 0, gns_side > 0) {
        (true, false) => DominationVerdict::PcStrictlyDominates,
        (false, false) => DominationVerdict::Identical,
        (false, true) => DominationVerdict::GnsStrictlyDominates,
        (true, true) => DominationVerdict::Incomparable,
    })
}

/// Sufficient conditions for the PC cut to define a facet.
pub fn pc_facet_condition(params: &CoverParams) -> bool {
    let rho1 = params.rho1();
    if !(params.admits_all_slopes() && rho1 > 0) {
        return false;
    }
    let part = params.interval_partition();
    let row = params.row();
    let half_rho1 = Rational::new(rho1 as i128, 2);
    let mut in_s1 = 0;
    for j in (0..row.len()).filter(|&j| !params.contains(j)) {
        let a = row.weight(j);
        match part.locate(q(a)) {
            Some(Location::Sloped(h)) => {
                if h == 1 {
                    in_s1 += 1;
                }
                if !(q(params.rho(h)) > half_rho1 && q(a) <= q(params.sloped_end(h)) - half_rho1) {
                    return false;
                }
            }
            Some(Location::Flat(h))
                if a < params.mu(h) => {
                    return false;
                }
            _ => {}
        }
    }
    in_s1 >= 3
}

/// Every sloped non-cover weight sits on the right end of its interval,
/// and at least one does.
pub fn gns_facet_condition(params: &CoverParams) -> bool {
    let items = sloped_items(params);
    !items.is_empty()
        && items.iter().all(|&(j, h)| params.row().weight(j) == params.sloped_end(h))
}

/// A row whose cover has a wide first sloped interval so that a single
/// non-cover item sits just inside `S_1`.
#[derive(Clone, Debug)]
pub struct DominationGapInstance {
    pub row: KnapsackRow,
    pub cover: Vec<usize>,
    /// Index of the item whose PC coefficient is 1/2 and GNS coefficient is at most epsilon.
    pub gap_item: usize,
    pub scale: i64,
}

/// Scales the base cover `(10, 9, ..., 9)` with excess 2 by
/// `M = ceil(1 / ((a_2 - a_1 + lambda') eps))` and adds one item of weight
/// `1 + M (a_1 - lambda')`.
pub fn gen_domination_gap_cover(epsilon: Rational, t: usize) -> Result<DominationGapInstance> {
    if !epsilon.is_positive() {
        return Err(CoverError::PreconditionViolated(format!("epsilon must be positive, got {epsilon}")));
    }
    if t < 2 {
        return Err(CoverError::PreconditionViolated(format!("cover size must be at least 2, got {t}")));
    }
    let mut base = vec![10i64];
    base.extend(std::iter::repeat_n(9, t - 1));
    let excess = 2i64;
    let base_capacity = base.iter().sum::<i64>() - excess;
    let gap = base[1] - base[0] + excess;
    let scale = (Rational::one() / (q(gap) * epsilon)).ceil().to_integer();
    let scale = i64::try_from(scale)
        .map_err(|_| CoverError::PreconditionViolated("epsilon too small for 64-bit weights".into()))?;
    let mut weights: Vec<i64> = base.iter().map(|a| a * scale).collect();
    weights.push(1 + scale * (base[0] - excess));
    let row = KnapsackRow::new(weights, scale * base_capacity)?;
    Ok(DominationGapInstance { row, cover: (0..t).collect(), gap_item: t, scale })
}

/// A real-valued `w` tabulated at uniform knots on `[0, rho_1]`, linearly
/// interpolated between knots.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedW {
    rho1: f64,
    values: Vec<f64>,
}

impl TabulatedW {
    pub fn new(rho1: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || !(rho1 > 0.0) {
            return Err(CoverError::PreconditionViolated("tabulation needs rho_1 > 0 and two knots".into()));
        }
        Ok(Self { rho1, values })
    }

    pub fn from_fn(rho1: f64, intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..=intervals).map(|i| f(rho1 * i as f64 / intervals as f64)).collect();
        Self::new(rho1, values)
    }

    /// `1 / (1 + exp(-steepness (x - rho_1/2)))`.
    pub fn logistic(rho1: f64, steepness: f64, intervals: usize) -> Result<Self> {
        Self::from_fn(rho1, intervals, |x| 1.0 / (1.0 + (-steepness * (x - rho1 / 2.0)).exp()))
    }

    pub fn rho1(&self) -> f64 {
        self.rho1
    }

    fn step(&self) -> f64 {
        self.rho1 / (self.values.len() - 1) as f64
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let slack = 1e-12 * self.rho1.max(1.0);
        if !(x >= -slack && x <= self.rho1 + slack) {
            return Err(CoverError::OutOfDomain { value: x.to_string(), capacity: self.rho1 as i64 });
        }
        let x = x.clamp(0.0, self.rho1);
        let pos = x / self.step();
        let i = (pos.floor() as usize).min(self.values.len() - 2);
        let frac = pos - i as f64;
        Ok(self.values[i] + (self.values[i + 1] - self.values[i]) * frac)
    }

    fn knot(&self, i: usize) -> f64 {
        if i + 1 == self.values.len() {
            self.rho1
        } else {
            self.step() * i as f64
        }
    }
}

/// Evaluates the `g_w` template with an arbitrary tabulated `w`. Caller beware:
/// nothing guarantees the result is superadditive or yields a valid cut.
pub fn eval_g_w(params: &CoverParams, w: &TabulatedW, z: f64) -> Result<f64> {
    let b = params.row().capacity();
    if !(z >= 0.0 && z <= b as f64) {
        return Err(CoverError::OutOfDomain { value: z.to_string(), capacity: b });
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let part = params.interval_partition();
    let inside = |lo: i64, hi: i64| (lo as f64) < z && z <= hi as f64;
    if let Some(h) = part.f_intervals.iter().position(|iv| inside(iv.lo, iv.hi)) {
        return Ok(h as f64);
    }
    let (h, _) = part
        .s_intervals
        .iter()
        .find(|(_, iv)| inside(iv.lo, iv.hi))
        .expect("intervals tile (0, b]");
    Ok(*h as f64 - w.eval(params.sloped_end(*h) as f64 - z)?)
}

/// `g_w` on `[0, b]` as a piecewise-linear function whose knots include
/// every tabulation knot of `w` mapped into each sloped interval.
pub fn g_w_piecewise(params: &CoverParams, w: &TabulatedW) -> Result<PiecewiseLinear<f64>> {
    if (w.rho1() - params.rho1() as f64).abs() > 1e-12 {
        return Err(CoverError::PreconditionViolated(format!(
            "w tabulated on [0, {}] but rho_1 = {}",
            w.rho1(),
            params.rho1()
        )));
    }
    let part = params.interval_partition();
    let mut builder = PiecewiseBuilder::new(0.0);
    builder.push(part.flat(0).hi as f64, 0.0, 0.0);
    for h in 1..params.t() {
        let level = h as f64;
        if let Some(s) = part.sloped(h) {
            let end = s.hi as f64;
            let rho_h = params.rho(h) as f64;
            // x = end - z runs from rho_h down to 0 across S_h
            let mut xs: Vec<f64> = (0..w.values.len()).map(|i| w.knot(i)).filter(|&x| x < rho_h).collect();
            xs.push(rho_h);
            xs.reverse();
            for pair in xs.windows(2) {
                builder.push(end - pair[1], level - w.eval(pair[0])?, level - w.eval(pair[1])?);
            }
        }
        builder.push(part.flat(h).hi as f64, level, level);
    }
    builder.build()
}

/// Dyadic rational equal to `x`. Denominators are capped at `2^62`, so bits
/// below that resolution are dropped; everything at least `2^-10` in magnitude
/// converts exactly.
pub fn rational_from_f64(x: f64) -> Rational {
    if x == 0.0 || !x.is_finite() {
        return Rational::zero();
    }
    let (mut mantissa, mut exponent, sign) = FloatCore::integer_decode(x);
    while exponent < -62 && mantissa > 0 {
        mantissa >>= 1;
        exponent += 1;
    }
    if mantissa == 0 {
        return Rational::zero();
    }
    let m = sign as i128 * mantissa as i128;
    if exponent >= 0 {
        Rational::from(m << exponent.min(70))
    } else {
        Rational::new(m, 1i128 << (-exponent))
    }
}

/// Parses `3`, `-1/6` or a decimal such as `0.71` into the exact rational it
/// denotes.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.len() > 30 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let digits = int.trim_start_matches(['-', '+']);
        if !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let whole: i128 = if digits.is_empty() { 0 } else { digits.parse().ok()? };
        let denom = 10i128.checked_pow(frac.len() as u32)?;
        let magnitude = whole.checked_mul(denom)?.checked_add(frac.parse::<i128>().ok()?)?;
        return Some(Rational::new(if negative { -magnitude } else { magnitude }, denom));
    }
    let r: Rational = text.parse().ok()?;
    Some(r)
}

/// The lifted cut obtained from a tabulated `w`; coefficients are the exact
/// binary values of the floating-point evaluations.
pub fn raw_w_cut(params: &CoverParams, w: &TabulatedW) -> Result<LiftedCut> {
    let row = params.row();
    let coefficients = (0..row.len())
        .map(|j| {
            if params.contains(j) {
                Ok(Rational::one())
            } else {
                eval_g_w(params, w, row.weight(j) as f64).map(rational_from_f64)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LiftedCut { coefficients, rhs: q(params.t() as i64 - 1), cover: params.cover(), method: LiftMethod::RawW })
}

/// Floating-point view of a rational (used for reporting).
pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
