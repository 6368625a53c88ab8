//! Isogeometric free-vibration analysis of stiffened laminated plates with cutouts.

// NaN must fail range checks, so they are written as negated comparisons
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index loops mirror the textbook form of the numerical kernels
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod eigen;
pub mod error;
pub mod exec;
pub mod export;
pub mod fixtures;
pub mod geometry;
pub mod materials;
pub mod model;
pub mod nurbs;
pub mod plate;
pub mod quadrature;
pub mod sparse;
pub mod stiffener;

pub use error::{Error, Result};
