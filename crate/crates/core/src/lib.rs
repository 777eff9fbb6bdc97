//! Numerical toolkit for Kubo-Ando operator means.
//!
//! * [`means`]: representation functions and their closure operations.
//! * [`hansen`]: piecewise-constant integral representations and the
//!   integral criteria for power monotonicity and geometric convexity.
//! * [`classify`]: grid-based membership tests with violation witnesses.
//! * [`matmean`]: positive definite matrix means and the Ando-Hiai search.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod config;
pub mod error;
pub mod hansen;
pub mod linalg;
pub mod matmean;
pub mod means;
pub mod numeric;
pub mod reproduce;

pub use error::{Error, Result};
pub use means::{MeanFunction, PositiveFunction};
