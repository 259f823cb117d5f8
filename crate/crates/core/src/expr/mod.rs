//! Exact algebra: polynomials, rational functions, planar maps and the
//! expression grammar shared by the catalog and the CLI.

pub mod map;
pub mod parse;
pub mod pit;
pub mod poly;
pub mod rfn;
pub mod upoly;

pub use map::{F64Map, RationalMap2};
pub use parse::{eval, eval_f64, expr_to_rationalfn, parse_expr, to_rfn_with, Expr, ExprAlgebra, Grammar, ParseError, Var};
pub use pit::{rfn_identical, LazyFrac, LazyMap, Witness};
pub use poly::{Degrees, Poly, Poly2};
pub use rfn::RationalFn2;
pub use upoly::{UPoly, URat};
