//! Elementary functions shared by every other module: the sawtooth, the unit
//! exponential, certified floors, continued fractions and divisor counts.

mod arith;
mod cf;
pub mod quad;
pub mod sum;

pub use arith::{divisor_tau, factorize, is_prime, iroot_ceil, iroot_floor};
pub use cf::{cf_convergents, Convergent, HighPrecisionReal};

use num_complex::Complex64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Sawtooth `psi(t) = {t} - 1/2`, with values in `[-1/2, 1/2)`.
pub fn psi(t: f64) -> f64 {
    let frac = t - t.floor();
    // t - floor(t) can round up to 1.0 for tiny negative t
    if frac >= 1.0 {
        -0.5
    } else {
        frac - 0.5
    }
}

/// `e(t) = exp(2 pi i t)`. The argument is reduced modulo 1 first so large
/// phases keep their fractional accuracy.
pub fn unit_exp(t: f64) -> Complex64 {
    let r = t - t.round();
    let (s, c) = (TAU * r).sin_cos();
    Complex64::new(c, s)
}

/// A real number together with a certified absolute error radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuardedReal {
    pub value: f64,
    pub guard: f64,
}

impl GuardedReal {
    pub fn new(value: f64, guard: f64) -> Self {
        debug_assert!(guard >= 0.0);
        GuardedReal { value, guard }
    }

    /// A value produced by one correctly-rounded-ish libm call: a few ulps of
    /// relative error, never less than `floor_guard` absolute.
    pub fn from_libm(value: f64, floor_guard: f64) -> Self {
        GuardedReal::new(value, (value.abs() * 8.0 * f64::EPSILON).max(floor_guard))
    }

    pub fn distance_to_integer(&self) -> f64 {
        (self.value - self.value.round()).abs()
    }
}

/// Floor of a guarded value. Fails when an integer lies inside the guard band,
/// in which case the caller has to recompute the value more precisely.
pub fn guarded_floor(x: GuardedReal) -> Result<i64> {
    if !x.value.is_finite() || x.distance_to_integer() <= x.guard {
        return Err(Error::AmbiguousFloor {
            value: x.value,
            guard: x.guard,
        });
    }
    Ok(x.value.floor() as i64)
}
