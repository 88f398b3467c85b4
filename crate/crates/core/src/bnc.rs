//! LP-based branch-and-bound for binary programs with one round of lifted
//! cover cuts at every node.
//!
//! Cuts come from the normalized knapsack rows only, so they are valid for
//! the whole problem and go into a single global pool.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::time::Instant;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cover_gen::{generate_covers, CoverRoutine, LpPoint};
use crate::instances::{InstanceError, IpInstance, NormalizedRow};
use crate::knapsack::CoverParams;
use crate::lifting::{lift_gns, lift_pc, lift_smart, LiftedCut};
use crate::oracles::enumerate::cut_valid;
use crate::simplex::{solve_lp_warm, Basis, LpError, LpModel, LpSolution, LpStatus};
use crate::Rational;

/// Minimum violation `alpha . x - rhs` for a cut to count as separating.
pub const SEPARATION_TOL: f64 = 1e-7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LiftingChoice {
    None,
    Pc,
    Gns,
    Smart,
}

impl LiftingChoice {
    pub const ALL: [LiftingChoice; 4] = [LiftingChoice::None, LiftingChoice::Pc, LiftingChoice::Gns, LiftingChoice::Smart];

    pub fn name(self) -> &'static str {
        match self {
            LiftingChoice::None => "none",
            LiftingChoice::Pc => "pc",
            LiftingChoice::Gns => "gns",
            LiftingChoice::Smart => "smart",
        }
    }
}

impl std::fmt::Display for LiftingChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for LiftingChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        LiftingChoice::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| format!("unknown lifting method '{s}' (none, pc, gns, smart)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeSelection {
    BestBound,
    Dfs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "kebab-case")]
pub struct BncConfig {
    pub per_node_cut_limit: usize,
    pub total_cut_limit: Option<usize>,
    pub lifting: LiftingChoice,
    pub cover_routines: Vec<CoverRoutine>,
    pub node_selection: NodeSelection,
    /// Seconds.
    pub time_limit: Option<f64>,
    pub node_limit: Option<usize>,
    pub integrality_tol: f64,
    /// Check every added cut against its source row by enumeration (rows of at most 22 items).
    pub validate_cuts: bool,
}

impl Default for BncConfig {
    fn default() -> Self {
        Self {
            per_node_cut_limit: 10,
            total_cut_limit: None,
            lifting: LiftingChoice::Pc,
            cover_routines: vec![CoverRoutine::Contiguous],
            node_selection: NodeSelection::BestBound,
            time_limit: None,
            node_limit: None,
            integrality_tol: 1e-6,
            validate_cuts: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BncStats {
    /// Nodes whose LP relaxation was solved.
    pub tree_size: usize,
    /// Distinct separating cuts found across all rounds.
    pub cuts_generated: usize,
    pub cuts_added: usize,
    pub incumbent: Option<i64>,
    pub proven_optimal: bool,
    pub wall_time: f64,
    pub lp_iterations: usize,
    pub root_bound_before_cuts: Option<f64>,
    pub root_bound_after_cuts: Option<f64>,
    pub cuts_validated: usize,
    pub cut_validation_failures: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BncResult {
    /// Best objective found; `None` if no feasible point was found.
    pub optimum: Option<i64>,
    pub point: Option<Vec<bool>>,
    pub stats: BncStats,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BncError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("rounded LP point violates row {0}")]
    Rounding(usize),
}

/// A lifted cut expressed over the original variables.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparatedCut {
    pub source_row: usize,
    /// Cut over the items of the normalized source row.
    pub local: LiftedCut,
    pub coefficients: Vec<Rational>,
    pub rhs: Rational,
    pub efficacy: f64,
}

impl SeparatedCut {
    fn coefficients_f64(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    fn key(&self) -> (Vec<Rational>, Rational) {
        (self.coefficients.clone(), self.rhs)
    }
}

fn dot(a: &[f64], x: &[f64]) -> f64 {
    a.iter().zip(x).map(|(a, b)| a * b).sum()
}

/// `(alpha . x - rhs) / ||alpha||_2`; `None` for an all-zero cut.
pub fn efficacy(coefficients: &[f64], rhs: f64, x: &[f64]) -> Option<f64> {
    let norm = coefficients.iter().map(|a| a * a).sum::<f64>().sqrt();
    (norm > 0.0).then(|| (dot(coefficients, x) - rhs) / norm)
}

fn to_global(row: &NormalizedRow, n: usize, cut: &LiftedCut) -> (Vec<Rational>, Rational) {
    let mut coefficients = vec![Rational::from(0); n];
    let mut rhs = cut.rhs;
    for (p, alpha) in cut.coefficients.iter().enumerate() {
        let j = row.vars[p];
        if row.complemented[p] {
            coefficients[j] -= alpha;
            rhs -= alpha;
        } else {
            coefficients[j] += alpha;
        }
    }
    (coefficients, rhs)
}

/// Separating lifted cover cuts for `x`, best efficacy first, at most `limit`.
fn cut_round(
    rows: &[NormalizedRow],
    objective: &[i64],
    x: &[f64],
    config: &BncConfig,
    limit: usize,
    seen: &HashSet<(Vec<Rational>, Rational)>,
) -> (Vec<SeparatedCut>, usize) {
    if limit == 0 || config.lifting == LiftingChoice::None {
        return (Vec::new(), 0);
    }
    let n = objective.len();
    let mut found: Vec<SeparatedCut> = Vec::new();
    let mut round_keys = HashSet::new();
    for (r, nrow) in rows.iter().enumerate() {
        let Some(krow) = &nrow.row else { continue };
        let point = LpPoint::new(nrow.to_local(x));
        let local_objective: Vec<i64> = nrow
            .vars
            .iter()
            .zip(&nrow.complemented)
            .map(|(&j, &c)| if c { -objective[j] } else { objective[j] })
            .collect();
        for &routine in &config.cover_routines {
            let covers = generate_covers(routine, krow, &point, &local_objective).unwrap_or_default();
            for cover in covers {
                let Ok(params) = CoverParams::new(krow, &cover) else { continue };
                let cuts = match config.lifting {
                    LiftingChoice::None => Vec::new(),
                    LiftingChoice::Pc => vec![lift_pc(&params)],
                    LiftingChoice::Gns => vec![lift_gns(&params)],
                    LiftingChoice::Smart => lift_smart(&params),
                };
                for local in cuts {
                    let (coefficients, rhs) = to_global(nrow, n, &local);
                    let coeffs_f: Vec<f64> = coefficients.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
                    let rhs_f = rhs.to_f64().unwrap_or(f64::NAN);
                    if dot(&coeffs_f, x) - rhs_f <= SEPARATION_TOL {
                        continue;
                    }
                    let Some(eff) = efficacy(&coeffs_f, rhs_f, x) else { continue };
                    let key = (coefficients.clone(), rhs);
                    if seen.contains(&key) || !round_keys.insert(key) {
                        continue;
                    }
                    found.push(SeparatedCut { source_row: r, local, coefficients, rhs, efficacy: eff });
                }
            }
        }
    }
    let generated = found.len();
    found.sort_by(|a, b| b.efficacy.partial_cmp(&a.efficacy).unwrap_or(Ordering::Equal));
    found.truncate(limit);
    (found, generated)
}

/// One round of cut generation at a point, as done at every tree node.
pub fn node_cut_round(instance: &IpInstance, x_lp: &LpPoint, config: &BncConfig) -> Result<Vec<SeparatedCut>, BncError> {
    let rows = instance.normalized_rows()?;
    let (cuts, _) =
        cut_round(&rows, &instance.objective, x_lp.values(), config, config.per_node_cut_limit, &HashSet::new());
    Ok(cuts)
}

#[derive(Clone, Debug)]
struct Node {
    lower: Vec<f64>,
    upper: Vec<f64>,
    bound: f64,
    order: usize,
    basis: Option<Basis>,
}

struct Queued(Node);

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    // max-heap: larger bound first, then earlier creation
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.bound.total_cmp(&other.0.bound).then(other.0.order.cmp(&self.0.order))
    }
}

enum Frontier {
    Heap(BinaryHeap<Queued>),
    Stack(Vec<Node>),
}

impl Frontier {
    fn pop(&mut self) -> Option<Node> {
        match self {
            Frontier::Heap(h) => h.pop().map(|q| q.0),
            Frontier::Stack(s) => s.pop(),
        }
    }

    /// Children in the order they should be explored.
    fn push_children(&mut self, first: Node, second: Node) {
        match self {
            Frontier::Heap(h) => {
                h.push(Queued(first));
                h.push(Queued(second));
            }
            Frontier::Stack(s) => {
                s.push(second);
                s.push(first);
            }
        }
    }
}

struct Search<'a> {
    instance: &'a IpInstance,
    rows: Vec<NormalizedRow>,
    config: &'a BncConfig,
    model: LpModel,
    seen: HashSet<(Vec<Rational>, Rational)>,
    stats: BncStats,
    best: Option<(i64, Vec<bool>)>,
    created: usize,
}

impl Search<'_> {
    fn can_prune(&self, bound: f64) -> bool {
        match &self.best {
            Some((v, _)) => (bound + 1e-6).floor() <= *v as f64,
            None => false,
        }
    }

    fn solve(&mut self, node: &Node, basis: Option<&Basis>) -> Result<LpSolution, BncError> {
        self.model.lower.clone_from(&node.lower);
        self.model.upper.clone_from(&node.upper);
        let sol = solve_lp_warm(&self.model, basis)?;
        self.stats.lp_iterations += sol.iterations;
        Ok(sol)
    }

    fn integral(&self, x: &[f64]) -> Option<Vec<bool>> {
        let tol = self.config.integrality_tol;
        x.iter().all(|v| v.min(1.0 - v) <= tol).then(|| x.iter().map(|&v| v > 0.5).collect())
    }

    fn record(&mut self, point: Vec<bool>) -> Result<(), BncError> {
        if let Some(r) = self.instance.rows.iter().position(|r| {
            r.coefficients.iter().zip(&point).filter(|(_, &v)| v).map(|(a, _)| a).sum::<i64>() > r.rhs
        }) {
            return Err(BncError::Rounding(r));
        }
        let value = self.instance.objective_value(&point);
        if self.best.as_ref().is_none_or(|(v, _)| value > *v) {
            self.best = Some((value, point));
        }
        Ok(())
    }

    fn cuts_remaining(&self) -> usize {
        let total = self.config.total_cut_limit.map_or(usize::MAX, |t| t.saturating_sub(self.stats.cuts_added));
        total.min(self.config.per_node_cut_limit)
    }

    fn add_cuts(&mut self, cuts: Vec<SeparatedCut>) {
        for cut in cuts {
            if self.config.validate_cuts {
                // rows too large for the exact check are left unvalidated
                if let Some(Ok(check)) = self.rows[cut.source_row].row.as_ref().map(|krow| cut_valid(krow, &cut.local)) {
                    self.stats.cuts_validated += 1;
                    if !check.is_valid() {
                        self.stats.cut_validation_failures += 1;
                    }
                }
            }
            self.model.add_row(cut.coefficients_f64(), cut.rhs.to_f64().unwrap_or(f64::NAN));
            self.seen.insert(cut.key());
            self.stats.cuts_added += 1;
        }
    }

    /// Solves a node's LP, runs the cut round, and returns the final LP if
    /// the node still needs branching.
    fn process(&mut self, node: &Node, is_root: bool) -> Result<Option<LpSolution>, BncError> {
        let mut sol = self.solve(node, node.basis.as_ref())?;
        self.stats.tree_size += 1;
        if sol.status == LpStatus::Infeasible {
            return Ok(None);
        }
        if is_root {
            self.stats.root_bound_before_cuts = Some(sol.objective_value);
        }
        if self.can_prune(sol.objective_value) {
            return Ok(None);
        }
        if let Some(point) = self.integral(&sol.point) {
            self.record(point)?;
            return Ok(None);
        }
        let limit = self.cuts_remaining();
        let (cuts, generated) =
            cut_round(&self.rows, &self.instance.objective, &sol.point, self.config, limit, &self.seen);
        self.stats.cuts_generated += generated;
        if !cuts.is_empty() {
            self.add_cuts(cuts);
            sol = self.solve(node, sol.basis.as_ref())?;
            if sol.status == LpStatus::Infeasible {
                return Ok(None);
            }
        }
        if is_root {
            self.stats.root_bound_after_cuts = Some(sol.objective_value);
        }
        if self.can_prune(sol.objective_value) {
            return Ok(None);
        }
        if let Some(point) = self.integral(&sol.point) {
            self.record(point)?;
            return Ok(None);
        }
        Ok(Some(sol))
    }

    fn branch(&mut self, node: &Node, sol: &LpSolution) -> (Node, Node) {
        let x = &sol.point;
        let mut var = 0;
        let mut best = -1.0;
        for (j, &v) in x.iter().enumerate() {
            let frac = v.min(1.0 - v);
            if frac > best + 1e-12 {
                best = frac;
                var = j;
            }
        }
        let mut up = Node {
            lower: node.lower.clone(),
            upper: node.upper.clone(),
            bound: sol.objective_value,
            order: self.created,
            basis: sol.basis.clone(),
        };
        let mut down = up.clone();
        down.order = self.created + 1;
        self.created += 2;
        up.lower[var] = 1.0;
        down.upper[var] = 0.0;
        (up, down)
    }
}

/// The LP relaxation and the bounds implied by row normalization; the flag
/// is set when two rows fix a variable to different values.
fn relaxation(instance: &IpInstance, rows: &[NormalizedRow]) -> (LpModel, Vec<f64>, Vec<f64>, bool) {
    let n = instance.n();
    let mut model = LpModel::new(instance.objective.iter().map(|&c| c as f64).collect());
    for r in &instance.rows {
        model.add_row(r.coefficients.iter().map(|&a| a as f64).collect(), r.rhs as f64);
    }
    let mut lower = vec![0.0; n];
    let mut upper = vec![1.0; n];
    let mut conflicting = false;
    for &(j, value) in rows.iter().flat_map(|r| &r.fixings) {
        if value {
            lower[j] = 1.0;
        } else {
            upper[j] = 0.0;
        }
        conflicting |= lower[j] > upper[j];
    }
    (model, lower, upper, conflicting)
}

/// Optimal point of the LP relaxation without cuts, or `None` if it is infeasible.
pub fn root_lp_point(instance: &IpInstance) -> Result<Option<Vec<f64>>, BncError> {
    let rows = instance.normalized_rows()?;
    let (mut model, lower, upper, conflicting) = relaxation(instance, &rows);
    if conflicting {
        return Ok(None);
    }
    model.lower = lower;
    model.upper = upper;
    let sol = solve_lp_warm(&model, None)?;
    Ok((sol.status == LpStatus::Optimal).then_some(sol.point))
}

/// Solves `max c.x, A x <= b, x binary` to optimality or until a limit is hit.
pub fn solve(instance: &IpInstance, config: &BncConfig) -> Result<BncResult, BncError> {
    let start = Instant::now();
    let rows = instance.normalized_rows()?;
    let (model, lower, upper, conflicting) = relaxation(instance, &rows);
    let mut search = Search {
        instance,
        rows,
        config,
        model,
        seen: HashSet::new(),
        stats: BncStats::default(),
        best: None,
        created: 1,
    };
    let finish = |search: Search, proven: bool| {
        let mut stats = search.stats;
        stats.incumbent = search.best.as_ref().map(|b| b.0);
        stats.proven_optimal = proven;
        stats.wall_time = start.elapsed().as_secs_f64();
        Ok(BncResult { optimum: search.best.as_ref().map(|b| b.0), point: search.best.map(|b| b.1), stats })
    };
    if conflicting {
        return finish(search, true);
    }
    let root = Node { lower, upper, bound: f64::INFINITY, order: 0, basis: None };
    let mut frontier = match config.node_selection {
        NodeSelection::BestBound => Frontier::Heap(BinaryHeap::from(vec![Queued(root)])),
        NodeSelection::Dfs => Frontier::Stack(vec![root]),
    };
    let mut is_root = true;
    while let Some(node) = frontier.pop() {
        if search.can_prune(node.bound) {
            continue;
        }
        let out_of_time = config.time_limit.is_some_and(|t| start.elapsed().as_secs_f64() > t);
        let out_of_nodes = config.node_limit.is_some_and(|l| search.stats.tree_size >= l);
        if out_of_time || out_of_nodes {
            return finish(search, false);
        }
        if let Some(sol) = search.process(&node, is_root)? {
            let (up, down) = search.branch(&node, &sol);
            frontier.push_children(up, down);
        }
        is_root = false;
    }
    finish(search, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_mkp, MkpKind, RawRow};
    use crate::oracles::ip_optimum;

    fn worked_example() -> IpInstance {
        IpInstance::new(
            "worked",
            vec![5, 7, 9, 1, 2, 6, 6, 5],
            vec![RawRow { coefficients: vec![10, 9, 8, 7, 6, 6, 5, 4], rhs: 26 }],
        )
        .unwrap()
    }

    fn oracle(inst: &IpInstance) -> Option<i64> {
        let (rows, rhs) = inst.row_matrix();
        ip_optimum(&inst.objective, &rows, &rhs).unwrap().map(|o| o.0)
    }

    #[test]
    fn solves_worked_example() {
        let inst = worked_example();
        for lifting in LiftingChoice::ALL {
            let config = BncConfig { lifting, validate_cuts: true, ..BncConfig::default() };
            let res = solve(&inst, &config).unwrap();
            assert_eq!(res.optimum, oracle(&inst));
            assert!(res.stats.proven_optimal);
            assert_eq!(res.stats.cut_validation_failures, 0);
        }
    }

    #[test]
    fn integral_point_yields_no_cuts() {
        let inst = worked_example();
        let x = LpPoint::new(vec![1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(node_cut_round(&inst, &x, &BncConfig::default()).unwrap().is_empty());
        let frac = LpPoint::new(vec![0.1, 0.8, 0.7, 0.4, 0.0, 1.0, 0.2, 0.8]);
        let zero = BncConfig { per_node_cut_limit: 0, ..BncConfig::default() };
        assert!(node_cut_round(&inst, &frac, &zero).unwrap().is_empty());
    }

    #[test]
    fn efficacy_definition() {
        assert_eq!(efficacy(&[1.0, 0.0], 0.0, &[1.0, 0.0]), Some(1.0));
        assert!(efficacy(&[1.0, 1.0], 2.0, &[0.5, 0.5]).unwrap() < 0.0);
        assert_eq!(efficacy(&[0.0], 0.0, &[1.0]), None);
    }

    #[test]
    fn cuts_tighten_root_and_agree_with_oracle() {
        let inst = gen_mkp(MkpKind::WeaklyCorrelated, 18, 2, 3).unwrap();
        let expected = oracle(&inst);
        for routine in [CoverRoutine::Contiguous, CoverRoutine::Spread, CoverRoutine::Default] {
            let config = BncConfig { cover_routines: vec![routine], validate_cuts: true, ..BncConfig::default() };
            let res = solve(&inst, &config).unwrap();
            assert_eq!(res.optimum, expected);
            let s = &res.stats;
            assert!(s.root_bound_after_cuts.unwrap() <= s.root_bound_before_cuts.unwrap() + 1e-9);
            assert!(s.cuts_added <= s.cuts_generated);
        }
    }

    #[test]
    fn total_cut_limit_is_respected() {
        let inst = gen_mkp(MkpKind::Uncorrelated, 20, 3, 11).unwrap();
        let config = BncConfig { total_cut_limit: Some(3), ..BncConfig::default() };
        let res = solve(&inst, &config).unwrap();
        assert!(res.stats.cuts_added <= 3);
        assert_eq!(res.optimum, oracle(&inst));
    }

    #[test]
    fn node_limit_stops_early() {
        let inst = gen_mkp(MkpKind::Uncorrelated, 30, 3, 2).unwrap();
        let config = BncConfig { node_limit: Some(2), lifting: LiftingChoice::None, ..BncConfig::default() };
        let res = solve(&inst, &config).unwrap();
        assert!(!res.stats.proven_optimal);
        assert!(res.stats.tree_size <= 2);
    }

    #[test]
    fn dfs_matches_best_bound() {
        let inst = gen_mkp(MkpKind::WeaklyCorrelated, 16, 3, 9).unwrap();
        let a = solve(&inst, &BncConfig::default()).unwrap();
        let b = solve(&inst, &BncConfig { node_selection: NodeSelection::Dfs, ..BncConfig::default() }).unwrap();
        assert_eq!(a.optimum, b.optimum);
    }

    #[test]
    fn negative_coefficients_and_fixings() {
        // x1 - x2 <= 0, 5 x1 + 9 x3 <= 7 (x3 fixed to 0), -4 x2 <= -4 (x2 = 1)
        let inst = IpInstance::new(
            "mixed",
            vec![3, 1, 10],
            vec![
                RawRow { coefficients: vec![1, -1, 0], rhs: 0 },
                RawRow { coefficients: vec![5, 0, 9], rhs: 7 },
                RawRow { coefficients: vec![0, -4, 0], rhs: -4 },
            ],
        )
        .unwrap();
        let res = solve(&inst, &BncConfig::default()).unwrap();
        assert_eq!(res.optimum, Some(4));
        assert_eq!(res.optimum, oracle(&inst));
    }
}
