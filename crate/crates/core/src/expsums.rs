//! Exponential sums over PS primes, all primes and integers, the sawtooth
//! weighted sum Omega, and the oscillatory integrals I_k.
//!
//! | kind  | terms                                           | coefficient                                   |
//! |-------|-------------------------------------------------|-----------------------------------------------|
//! | S_k   | PS primes with `lambda0 X < p^k <= X`           | `p^(1-gamma) ln p`                            |
//! | Sigma | primes with `lambda0 X < p^4 <= X`              | `ln p`                                        |
//! | U     | integers with `lambda0 X < n^4 <= X`            | `1`                                           |
//! | Omega | primes with `lambda0 X < p^4 <= X`              | `p^(1-gamma) ln p (psi(-(p+1)^g) - psi(-p^g))` |
//!
//! Every sum is `sum_i c_i e(t f_i)` with integer frequencies `f_i`, reduced
//! through the fixed pairwise tree of [`crate::numeric::sum`].

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::numeric::quad::gauss_legendre;
use crate::numeric::sum::{pairwise_sum, par_pairwise_sum};
use crate::primes::{ceil_pow, power_range, prime_range, sieve_ps_table, GammaType};

/// Points per sweep chunk; each chunk restarts from an exactly computed phase.
const SWEEP_CHUNK: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SumKind {
    S,
    Sigma,
    U,
    Omega,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpSumSpec {
    pub kind: SumKind,
    pub k: u32,
    pub x: f64,
    pub lambda0: f64,
    pub gamma: Option<GammaType>,
}

impl ExpSumSpec {
    pub fn s(k: u32, x: f64, lambda0: f64, gamma: GammaType) -> Self {
        ExpSumSpec { kind: SumKind::S, k, x, lambda0, gamma: Some(gamma) }
    }

    pub fn sigma(x: f64, lambda0: f64) -> Self {
        ExpSumSpec { kind: SumKind::Sigma, k: 4, x, lambda0, gamma: None }
    }

    pub fn u(x: f64, lambda0: f64) -> Self {
        ExpSumSpec { kind: SumKind::U, k: 4, x, lambda0, gamma: None }
    }

    pub fn omega(x: f64, lambda0: f64, gamma: GammaType) -> Self {
        ExpSumSpec { kind: SumKind::Omega, k: 4, x, lambda0, gamma: Some(gamma) }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x >= 1.0 && self.x.is_finite()) {
            return Err(Error::InvalidInput(format!("X = {} must be >= 1", self.x)));
        }
        if !(self.lambda0 > 0.0 && self.lambda0 < 1.0) {
            return Err(Error::InvalidInput(format!("lambda0 = {} must lie in (0, 1)", self.lambda0)));
        }
        let needs_gamma = matches!(self.kind, SumKind::S | SumKind::Omega);
        if needs_gamma != self.gamma.is_some() {
            return Err(Error::InvalidInput(format!("{:?} sums {} gamma", self.kind, if needs_gamma { "need" } else { "take no" })));
        }
        match self.kind {
            SumKind::S if !(1..=4).contains(&self.k) => Err(Error::InvalidInput(format!("S_k needs k in 1..=4, got {}", self.k))),
            SumKind::Sigma | SumKind::U | SumKind::Omega if self.k != 4 => {
                Err(Error::InvalidInput(format!("{:?} is a fourth-power sum, got k = {}", self.kind, self.k)))
            }
            _ => Ok(()),
        }
    }
}

/// A finite sum `sum_i c_i e(t f_i)` ready for repeated evaluation.
#[derive(Debug, Clone, Default)]
pub struct ExpSum {
    pub freqs: Vec<u64>,
    pub coefs: Vec<f64>,
}

/// Value of a sum together with whether its range held no terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumValue {
    pub value: Complex64,
    pub empty: bool,
}

/// `(t f) mod 1` in `[-1/2, 1/2]`, keeping the rounding error of the product.
/// Odd in `t`, so sums with real coefficients are exactly conjugate-symmetric.
fn phase(t: f64, f: u64) -> f64 {
    let t = t - t.round();
    let ff = f as f64;
    let r = t * ff;
    let err = t.mul_add(ff, -r);
    (r - r.round()) + err
}

fn cis(turns: f64) -> Complex64 {
    let (s, c) = (TAU * turns).sin_cos();
    Complex64::new(c, s)
}

/// Certified `psi(-m^gamma)` as `(ceil(m^gamma) - m^gamma) - 1/2`, plus the ceiling and power.
fn psi_neg_pow(m: u64, gamma: &GammaType) -> Result<(f64, u64, f64)> {
    let (c, v) = ceil_pow(m, gamma)?;
    Ok(((c as f64 - v) - 0.5, c, v))
}

/// The three per-prime coefficients of the fourth-power decomposition:
/// PS indicator, smooth difference `(p+1)^g - p^g` and sawtooth difference.
fn s4_parts(p: u64, gamma: &GammaType) -> Result<(f64, f64, f64)> {
    let (psi_x, cx, x) = psi_neg_pow(p, gamma)?;
    let (psi_y, cy, y) = psi_neg_pow(p + 1, gamma)?;
    Ok(((cy - cx) as f64, y - x, psi_y - psi_x))
}

impl ExpSum {
    pub fn build(spec: &ExpSumSpec) -> Result<Self> {
        spec.validate()?;
        let (x, l0, k) = (spec.x, spec.lambda0, spec.k);
        let out = match spec.kind {
            SumKind::S => {
                let gamma = spec.gamma.unwrap();
                match sieve_ps_table(x.max(2.0), l0, k, gamma) {
                    Ok(t) => ExpSum {
                        freqs: t.primes.iter().map(|&p| p.pow(k)).collect(),
                        coefs: t.weights,
                    },
                    Err(Error::RangeEmpty(_)) => ExpSum::default(),
                    Err(e) => return Err(e),
                }
            }
            SumKind::Sigma => {
                let primes = prime_range(x, l0, 4);
                ExpSum {
                    freqs: primes.iter().map(|&p| p.pow(4)).collect(),
                    coefs: primes.iter().map(|&p| (p as f64).ln()).collect(),
                }
            }
            SumKind::U => match power_range(x, l0, 4) {
                Some((lo, hi)) => ExpSum {
                    freqs: (lo..=hi).map(|n| n.pow(4)).collect(),
                    coefs: vec![1.0; (hi - lo + 1) as usize],
                },
                None => ExpSum::default(),
            },
            SumKind::Omega => {
                let gamma = spec.gamma.unwrap();
                let primes = prime_range(x, l0, 4);
                let mut coefs = Vec::with_capacity(primes.len());
                for &p in &primes {
                    let (_, _, saw) = s4_parts(p, &gamma)?;
                    coefs.push(crate::primes::ps_weight(p, &gamma) * saw);
                }
                ExpSum {
                    freqs: primes.iter().map(|&p| p.pow(4)).collect(),
                    coefs,
                }
            }
        };
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// `sum_i |c_i|`, the trivial bound on `|S(t)|`.
    pub fn abs_mass(&self) -> f64 {
        let a: Vec<f64> = self.coefs.iter().map(|c| c.abs()).collect();
        pairwise_sum(&a)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let terms: Vec<Complex64> = self
            .freqs
            .par_iter()
            .zip(&self.coefs)
            .map(|(&f, &c)| cis(phase(t, f)) * c)
            .collect();
        par_pairwise_sum(&terms)
    }

    /// Values at `t0 + j h` for `j < n`. Each term is advanced by a fixed
    /// rotation and re-seeded exactly every 256 points; chunks are independent
    /// so the output does not depend on the thread count.
    pub fn sweep(&self, t0: f64, h: f64, n: usize) -> Vec<Complex64> {
        let steps: Vec<Complex64> = self.freqs.iter().map(|&f| cis(phase(h, f))).collect();
        let chunks = n.div_ceil(SWEEP_CHUNK);
        let parts: Vec<Vec<Complex64>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * SWEEP_CHUNK;
                let len = SWEEP_CHUNK.min(n - start);
                let t = t0 + start as f64 * h;
                let mut cur: Vec<Complex64> = self
                    .freqs
                    .iter()
                    .zip(&self.coefs)
                    .map(|(&f, &cf)| cis(phase(t, f)) * cf)
                    .collect();
                let mut out = Vec::with_capacity(len);
                for j in 0..len {
                    out.push(pairwise_sum(&cur));
                    if j + 1 < len {
                        for (z, s) in cur.iter_mut().zip(&steps) {
                            *z *= *s;
                        }
                    }
                }
                out
            })
            .collect();
        parts.concat()
    }
}

/// Evaluate one sum at `t`. An empty range gives 0 with `empty` set.
pub fn eval_sum(spec: &ExpSumSpec, t: f64) -> Result<SumValue> {
    let s = ExpSum::build(spec)?;
    Ok(SumValue {
        value: s.eval(t),
        empty: s.is_empty(),
    })
}

/// `I_k(t) = integral over (lambda0 X)^(1/k) < y <= X^(1/k) of e(t y^k) dy`.
///
/// After `u = y^k` the integrand is `(1/k) u^(1/k - 1) e(t u)`; panels are at
/// most `1/(8|t|)` long in `u` (an eighth of a period) and at most a quarter
/// of their left endpoint, which tames the algebraic factor near small `u`.
pub fn eval_i(k: u32, t: f64, x: f64, lambda0: f64) -> Complex64 {
    assert!(k >= 1 && x >= 1.0 && lambda0 > 0.0 && lambda0 < 1.0);
    let lo = lambda0 * x;
    let kf = k as f64;
    if t == 0.0 {
        return Complex64::new(x.powf(1.0 / kf) - lo.powf(1.0 / kf), 0.0);
    }
    if k == 1 {
        // closed form (e(tX) - e(t lambda0 X)) / (2 pi i t)
        let num = cis(t * x) - cis(t * lo);
        return num / Complex64::new(0.0, TAU * t);
    }
    let (nodes, weights) = gauss_legendre(8);
    let osc = 1.0 / (8.0 * t.abs());
    let min_panel = (x - lo) / 64.0;
    let mut panels = Vec::new();
    let mut a = lo;
    while a < x {
        let b = (a + osc.min(0.25 * a).min(min_panel)).min(x);
        panels.push((a, b));
        a = b;
    }
    let vals: Vec<Complex64> = panels
        .par_iter()
        .map(|&(a, b)| {
            let half = 0.5 * (b - a);
            let mut acc = Complex64::new(0.0, 0.0);
            for (xi, wi) in nodes.iter().zip(&weights) {
                let u = a + half * (1.0 + xi);
                acc += cis(t * u) * (wi * u.powf(1.0 / kf - 1.0));
            }
            acc * (half / kf)
        })
        .collect();
    par_pairwise_sum(&vals)
}

/// The exact split of the fourth-power sum over PS primes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct S4Decomposition {
    /// `S_4(t)` over PS primes.
    pub s4: Complex64,
    /// `sum p^(1-g) ((p+1)^g - p^g) e(t p^4) ln p` over all primes in range.
    pub mainterm: Complex64,
    /// `Omega(t)`.
    pub omega: Complex64,
    /// `S_4 - mainterm - Omega`, zero up to rounding.
    pub residual: Complex64,
    /// `mainterm - gamma Sigma(t)`.
    pub taylor_gap: Complex64,
    /// `sum p^(1-g) ln p` over all primes in range, the scale for the residual.
    pub weight_mass: f64,
}

/// Split `S_4(t)` into the smooth main term and Omega using
/// `[-x] - [-y] = (y - x) + psi(-y) - psi(-x)` with `x = p^g`, `y = (p+1)^g`.
pub fn decompose_s4(t: f64, x: f64, lambda0: f64, gamma: GammaType) -> Result<S4Decomposition> {
    ExpSumSpec::s(4, x, lambda0, gamma).validate()?;
    let primes = prime_range(x, lambda0, 4);
    let n = primes.len();
    let mut ind = Vec::with_capacity(n);
    let mut main = Vec::with_capacity(n);
    let mut saw = Vec::with_capacity(n);
    let mut sigma = Vec::with_capacity(n);
    let mut mass = Vec::with_capacity(n);
    for &p in &primes {
        let (i, m, s) = s4_parts(p, &gamma)?;
        let w = crate::primes::ps_weight(p, &gamma);
        let e = cis(phase(t, p.pow(4)));
        ind.push(e * (w * i));
        main.push(e * (w * m));
        saw.push(e * (w * s));
        sigma.push(e * (p as f64).ln());
        mass.push(w);
    }
    let s4 = pairwise_sum(&ind);
    let mainterm = pairwise_sum(&main);
    let omega = pairwise_sum(&saw);
    let sig = pairwise_sum(&sigma);
    Ok(S4Decomposition {
        s4,
        mainterm,
        omega,
        residual: s4 - mainterm - omega,
        taylor_gap: mainterm - sig * gamma.value(),
        weight_mass: pairwise_sum(&mass),
    })
}

/// `|I_4(t) - U(t)| / (1 + |t| X)`.
pub fn euler_gap(t: f64, x: f64, lambda0: f64) -> Result<f64> {
    let u = eval_sum(&ExpSumSpec::u(x, lambda0), t)?.value;
    Ok((eval_i(4, t, x, lambda0) - u).norm() / (1.0 + t.abs() * x))
}

/// `|S_1(t) - gamma I_1(t)| / X`, the normalised major-arc discrepancy.
pub fn major_arc_gap(t: f64, x: f64, lambda0: f64, gamma: GammaType) -> Result<f64> {
    let s = eval_sum(&ExpSumSpec::s(1, x, lambda0, gamma), t)?.value;
    Ok((s - eval_i(1, t, x, lambda0) * gamma.value()).norm() / x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g(v: f64) -> GammaType {
        GammaType::new(v).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn examples() {
        let u = eval_sum(&ExpSumSpec::u(100.0, 0.05), 0.0).unwrap();
        assert_eq!(u.value, Complex64::new(2.0, 0.0));
        assert!(!u.empty);
        let s = eval_sum(&ExpSumSpec::s(1, 1000.0, 0.1, g(0.9)), 0.0).unwrap();
        assert!(s.value.re > 0.0 && s.value.im == 0.0);
        let e = eval_sum(&ExpSumSpec::u(10.0, 0.9), 0.3).unwrap();
        assert!(e.empty && e.value == Complex64::new(0.0, 0.0));
        assert!(ExpSumSpec { gamma: None, ..ExpSumSpec::s(1, 10.0, 0.1, g(0.9)) }.validate().is_err());
    }

    #[test]
    fn conjugate_symmetry_and_triangle_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let specs = [
            ExpSumSpec::s(1, 5e4, 0.1, g(0.9)),
            ExpSumSpec::s(2, 5e4, 0.1, g(0.9)),
            ExpSumSpec::s(4, 1e6, 0.01, g(0.95)),
            ExpSumSpec::sigma(1e6, 0.01),
            ExpSumSpec::u(1e6, 0.01),
            ExpSumSpec::omega(1e6, 0.01, g(0.95)),
        ];
        for spec in &specs {
            let s = ExpSum::build(spec).unwrap();
            let zero = s.abs_mass();
            for _ in 0..1000 {
                let t: f64 = rng.gen_range(-10.0..10.0);
                let a = s.eval(t);
                let b = s.eval(-t);
                assert_eq!(a, b.conj(), "{spec:?} t={t}");
                assert!(a.norm() <= zero * (1.0 + 1e-12));
            }
        }
        for k in 1..=4 {
            let a = eval_i(k, 0.0123, 1e4, 0.1);
            let b = eval_i(k, -0.0123, 1e4, 0.1);
            assert!(close(a, b.conj(), 1e-12));
        }
    }

    #[test]
    fn integer_frequency_periodicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for spec in [ExpSumSpec::u(1e8, 0.1), ExpSumSpec::sigma(1e8, 0.1), ExpSumSpec::s(3, 1e7, 0.1, g(0.9))] {
            let s = ExpSum::build(&spec).unwrap();
            let scale = s.abs_mass();
            for _ in 0..200 {
                // dyadic t keeps t + 1 exact
                let t = rng.gen_range(-1_000_000i64..1_000_000) as f64 / 1_048_576.0;
                assert_eq!(s.eval(t), s.eval(t + 1.0));
                let t: f64 = rng.gen_range(-3.0..3.0);
                assert!(close(s.eval(t), s.eval(t + 1.0), 1e-12 * scale));
            }
        }
    }

    #[test]
    fn sweep_matches_pointwise() {
        let s = ExpSum::build(&ExpSumSpec::s(1, 2e4, 0.1, g(0.97))).unwrap();
        let (t0, h) = (-0.0371, 1.3e-5);
        let sw = s.sweep(t0, h, 1000);
        let mass = s.abs_mass();
        for (j, v) in sw.iter().enumerate() {
            assert!(close(*v, s.eval(t0 + j as f64 * h), 1e-11 * mass), "j={j}");
        }
    }

    #[test]
    fn i_k_examples() {
        let v = eval_i(4, 0.0, 1e4, 0.0625);
        assert!((v.re - 5.0).abs() < 1e-12);
        // I_1 closed form against the generic quadrature path through I_2 with u = y^2 reversed
        let t = 0.0137;
        let direct = crate::numeric::quad::integrate(|y| (TAU * t * y).cos(), 100.0, 1000.0, 200, 10);
        assert!((eval_i(1, t, 1000.0, 0.1).re - direct).abs() < 1e-10);
        for k in 2..=4 {
            let (x, l0) = (5e3_f64, 0.2_f64);
            let lo = (l0 * x).powf(1.0 / k as f64);
            let hi = x.powf(1.0 / k as f64);
            let re = crate::numeric::quad::integrate(|y| (TAU * t * y.powi(k as i32)).cos(), lo, hi, 4000, 10);
            let im = crate::numeric::quad::integrate(|y| (TAU * t * y.powi(k as i32)).sin(), lo, hi, 4000, 10);
            let got = eval_i(k, t, x, l0);
            assert!(close(got, Complex64::new(re, im), 1e-9 * (hi - lo)), "k={k} {got} {re} {im}");
        }
    }

    #[test]
    fn i_k_first_derivative_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..300 {
            let k = rng.gen_range(1..=4u32);
            let x = 10f64.powf(rng.gen_range(2.0..5.0));
            let t = 10f64.powf(rng.gen_range(-6.0..-1.0)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            let l0 = rng.gen_range(0.05..0.5);
            let v = eval_i(k, t, x, l0).norm();
            let bound = 4.0 * x.powf(1.0 / k as f64 - 1.0) * x.min(1.0 / t.abs());
            assert!(v <= bound, "k={k} x={x} t={t} {v} {bound}");
        }
    }

    #[test]
    fn decomposition_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let t: f64 = rng.gen_range(-1.0..1.0);
            let d = decompose_s4(t, 1e8, 0.01, g(0.95)).unwrap();
            assert!(d.residual.norm() <= 1e-9 * d.weight_mass, "t={t} {:?}", d.residual);
            let s4 = eval_sum(&ExpSumSpec::s(4, 1e8, 0.01, g(0.95)), t).unwrap().value;
            assert!(close(s4, d.s4, 1e-12 * d.weight_mass));
            let om = eval_sum(&ExpSumSpec::omega(1e8, 0.01, g(0.95)), t).unwrap().value;
            assert!(close(om, d.omega, 1e-12 * d.weight_mass));
        }
        let d = decompose_s4(0.0, 1e4, 0.01, g(0.95)).unwrap();
        assert_eq!(d.mainterm.im, 0.0);
        let d = decompose_s4(0.3, 10.0, 0.9, g(0.95)).unwrap();
        assert_eq!((d.s4, d.mainterm, d.omega), Default::default());
    }

    #[test]
    fn taylor_gap_is_small_at_zero() {
        let gamma = g(0.95);
        let d = decompose_s4(0.0, 1e8, 0.01, gamma).unwrap();
        // (p+1)^g - p^g - g p^(g-1) is at most g(1-g)/2 p^(g-2) in size
        let primes = prime_range(1e8, 0.01, 4);
        let cap: f64 = primes
            .iter()
            .map(|&p| {
                let pf = p as f64;
                0.5 * 0.95 * 0.05 * pf.powf(0.95_f64 - 2.0) * pf.powf(0.05_f64) * pf.ln()
            })
            .sum();
        assert!(d.taylor_gap.norm() <= cap * 1.01 + 1e-9 * d.weight_mass, "{} {cap}", d.taylor_gap);
    }

    #[test]
    fn euler_gap_is_bounded() {
        assert!((eval_i(4, 0.0, 1e4, 0.01) - eval_sum(&ExpSumSpec::u(1e4, 0.01), 0.0).unwrap().value).norm() <= 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let x = 10f64.powf(rng.gen_range(2.0..6.0));
            let t = 10f64.powf(rng.gen_range(-8.0..-3.0)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            worst = worst.max(euler_gap(t, x, 0.05).unwrap());
        }
        assert!(worst <= 20.0, "{worst}");
        // continuity in t
        let a = euler_gap(1e-5, 1e5, 0.05).unwrap();
        let b = euler_gap(1e-5 + 1e-13, 1e5, 0.05).unwrap();
        assert!((a - b).abs() < 1e-6);
    }

    #[test]
    fn major_arc_soft_check() {
        let gap = major_arc_gap(0.0, 1e6, 0.1, g(0.95)).unwrap();
        assert!(gap < 0.5, "{gap}");
    }
}
