//! Independent exhaustive checkers used to confirm lifting, validity,
//! superadditivity and facet claims on small instances.

pub mod enumerate;
pub mod optimum;
pub mod superadd;
pub mod tilde;
pub mod tpoly;

pub use enumerate::{cover_inequality, cut_valid, facet_report, lifting_fn_bruteforce, CutCheck, FacetReport};
pub use optimum::{ip_optimum, Optimum};
pub use superadd::{superadditivity_check, Approach, Counterexample};
pub use tilde::{tilde_g, tilde_g_check};
pub use tpoly::{t_facet_check, t_polyhedron, t_vertex_check, TPolyhedron};
