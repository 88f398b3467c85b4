//! Lifted minimal cover inequalities for 0-1 knapsack rows, exact checking
//! oracles, and a small LP-based branch-and-cut solver that uses them.

pub mod bench;
pub mod bnc;
pub mod cover_gen;
pub mod error;
pub mod instances;
pub mod knapsack;
pub mod lifting;
pub mod oracles;
pub mod piecewise;
pub mod simplex;

/// Exact rational arithmetic used throughout cut generation and checking.
pub type Rational = num_rational::Ratio<i128>;

pub use error::{CoverError, Result};
pub use knapsack::{is_minimal_cover, CoverParams, Interval, IntervalPartition, KnapsackRow, Location};
pub use lifting::{
    classify_domination, eval_g_k, eval_g_w, g_k_piecewise, g_w_piecewise, gen_domination_gap_cover,
    gns_facet_condition, lift_gns, lift_pc, lift_smart, lift_with, parse_rational, pc_facet_condition, raw_w_cut, DominationVerdict,
    LiftMethod, LiftParam, LiftedCut, TabulatedW,
};
