//! Difference-field towers over `Q(params)(k)` with depth-optimal telescoping.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is exact:
//! rationals are big rationals, zero tests compare canonical forms.

#![no_std]

extern crate alloc;

pub mod arith;
pub mod base_solver;
pub mod depth_optimal;
pub mod expr;
pub mod frontend;
pub mod linalg;
pub mod mpoly;
pub mod oracle;
pub mod ratfunc;
pub mod reduction;
pub mod shift;
pub mod tower;

pub use arith::Rat;
pub use mpoly::{MPoly, Mono};
pub use ratfunc::RatFunc;
pub use tower::{Elem, Generator, Kind, SolutionBasis, Tower, Var};

