//! Piatetski-Shapiro primes and the ternary problem
//! `|lambda1 p1 + lambda2 p2 + lambda3 p3^4 + eta| < eps`, computed at desk scale.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod error;
pub mod expsums;
pub mod gamma;
pub mod moments;
pub mod numeric;
pub mod primes;
pub mod smoothing;
pub mod verify;

pub use error::{Error, Result};
