//! Numerical laboratory for the argument of the Riemann zeta function, its
//! iterates, convolution identities and resonator experiments.

// `!(x > 0.0)` also rejects NaN; tabulated constants keep their full digits.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod arith;
pub mod convolution;
pub mod error;
pub mod experiment;
pub mod iterates;
pub mod numeric;
pub mod resonator;
pub mod zeta;

pub use error::{Error, Result};
