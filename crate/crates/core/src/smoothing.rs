//! The compactly supported weight theta and its Fourier transform.
//!
//! theta is the indicator of `[-a, a]` (with `a = 7 eps / 8`) convolved with
//! the k-fold self-convolution of a unit-mass box of width `w = eps / (4k)`.
//! It equals 1 on `|y| <= 3 eps / 4`, vanishes for `|y| >= eps`, is `C^(k-1)`
//! with piecewise polynomial pieces, and its transform is a sinc product:
//!
//! ```text
//! Theta(x) = sin(2 pi a x) / (pi x) * (sin(pi w x) / (pi w x))^k
//! ```
//!
//! so `|Theta(x)| <= min(7 eps / 4, 1 / (pi |x|), (4k / (pi eps |x|))^k / (pi |x|))`.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Above this order the Irwin-Hall sums are evaluated in exact rationals.
const EXACT_ORDER: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmoothingKernel {
    pub eps: f64,
    pub k: u32,
    /// Half-width of the plateau indicator, `7 eps / 8`.
    pub a: f64,
    /// Width of each smoothing box, `eps / (4k)`.
    pub w: f64,
}

impl SmoothingKernel {
    pub fn new(eps: f64, k: u32) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) || k == 0 {
            return Err(Error::InvalidInput(format!("kernel needs eps > 0 and k >= 1 (eps={eps}, k={k})")));
        }
        Ok(SmoothingKernel {
            eps,
            k,
            a: 7.0 * eps / 8.0,
            w: eps / (4.0 * k as f64),
        })
    }

    /// Points where theta switches polynomial piece (positive side).
    pub fn knots(&self) -> Vec<f64> {
        (0..=self.k).map(|i| 0.75 * self.eps + i as f64 * self.w).collect()
    }

    fn z_of(&self, s: f64) -> f64 {
        s / self.w + self.k as f64 / 2.0
    }

    /// theta(y).
    pub fn theta(&self, y: f64) -> f64 {
        let y = y.abs();
        if y <= 0.75 * self.eps {
            return 1.0;
        }
        if y >= self.eps {
            return 0.0;
        }
        irwin_hall(self.z_of(self.a - y), self.k, 0)
    }

    /// `Phi(s) = integral of theta over (-inf, s]`.
    pub fn theta_integral(&self, s: f64) -> f64 {
        if s <= -self.eps {
            return 0.0;
        }
        if s >= self.eps {
            return 2.0 * self.a;
        }
        self.w * (irwin_hall(self.z_of(s + self.a), self.k, 1) - irwin_hall(self.z_of(s - self.a), self.k, 1))
    }

    /// `Phi2(s) = integral of Phi over (-inf, s]`; linear (`2 a s`) past the support.
    pub fn theta_double_integral(&self, s: f64) -> f64 {
        if s <= -self.eps {
            return 0.0;
        }
        if s >= self.eps {
            return 2.0 * self.a * s;
        }
        let w2 = self.w * self.w;
        w2 * (irwin_hall(self.z_of(s + self.a), self.k, 2) - irwin_hall(self.z_of(s - self.a), self.k, 2))
    }

    /// `Theta(x) = integral theta(y) e(-xy) dy`, real and even.
    pub fn theta_fourier(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 2.0 * self.a;
        }
        let head = (2.0 * PI * self.a * x).sin() / (PI * x);
        head * sinc(PI * self.w * x).powi(self.k as i32)
    }

    /// The decay envelope `min(7 eps / 4, 1 / (pi |x|), (4k / (pi eps |x|))^k / (pi |x|))`.
    pub fn fourier_bound(&self, x: f64) -> f64 {
        let plateau = 1.75 * self.eps;
        let x = x.abs();
        if x == 0.0 {
            return plateau;
        }
        let first = 1.0 / (PI * x);
        let ratio = 4.0 * self.k as f64 / (PI * self.eps * x);
        plateau.min(first).min(first * ratio.powi(self.k as i32))
    }

    /// `(1/k) (4k / (pi eps T))^k`, which equals
    /// `integral_T^inf (1/t) (4k / (pi eps t))^k dt`.
    pub fn theta_tail_mass(&self, t: f64) -> f64 {
        assert!(t > 0.0, "tail start must be positive");
        let k = self.k as f64;
        (4.0 * k / (PI * self.eps * t)).powi(self.k as i32) / k
    }
}

fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-8 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// m-th iterated integral (m = 0 is the CDF) of the Irwin-Hall law of the sum
/// of k independent U(0,1), evaluated at z. Reflection about k/2 keeps the
/// alternating sums short.
pub fn irwin_hall(z: f64, k: u32, m: u32) -> f64 {
    assert!(m <= 2);
    let kf = k as f64;
    if z <= 0.0 {
        return 0.0;
    }
    if z > kf / 2.0 {
        let r = kf - z;
        let mirror = if r > 0.0 { irwin_hall_direct(r, k, m) } else { 0.0 };
        let c = z - kf / 2.0;
        return match m {
            0 => 1.0 - mirror,
            1 => c + mirror,
            _ => 0.5 * (c * c + kf / 12.0) - mirror,
        };
    }
    irwin_hall_direct(z, k, m)
}

fn irwin_hall_direct(z: f64, k: u32, m: u32) -> f64 {
    if k > EXACT_ORDER {
        return irwin_hall_exact(z, k, m);
    }
    let n = k + m;
    let mut fact = 1.0;
    for i in 2..=n {
        fact *= i as f64;
    }
    let mut binom = 1.0;
    let mut acc = 0.0;
    let top = z.floor() as u32;
    for i in 0..=top.min(k) {
        let term = binom * (z - i as f64).powi(n as i32);
        acc += if i % 2 == 0 { term } else { -term };
        binom = binom * (k - i) as f64 / (i + 1) as f64;
    }
    acc / fact
}

fn irwin_hall_exact(z: f64, k: u32, m: u32) -> f64 {
    let zr = BigRational::from_float(z).expect("finite z");
    let n = (k + m) as usize;
    let mut fact = BigInt::one();
    for i in 2..=n {
        fact *= i;
    }
    let mut acc = BigRational::zero();
    let mut binom = BigInt::one();
    let top = z.floor() as u32;
    for i in 0..=top.min(k) {
        let base = &zr - BigRational::from_integer(BigInt::from(i));
        let term = num_traits::pow(base, n) * BigRational::from_integer(binom.clone());
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
        binom = binom * (k - i) / (i + 1);
    }
    (acc / BigRational::from_integer(fact)).to_f64().unwrap_or(f64::NAN)
}
