//! Explicit two-level schemes for `u_t + a u_x = 0` on an interval with a
//! homogeneous Dirichlet inflow and extrapolation outflow closure.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod boundary;
pub mod cli;
pub mod energy;
pub mod error;
pub mod field;
pub mod output;
pub mod rng;
pub mod scheme;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
