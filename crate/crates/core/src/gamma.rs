//! The weighted solution count
//!
//! ```text
//! Gamma(X) = sum theta(l1 p1 + l2 p2 + l3 p3^4 + eta) w(p1) w(p2) w(p3),   w(p) = p^(1-g) ln p
//! ```
//!
//! over PS primes with `lambda0 X < p1, p2, p3^4 <= X`, computed three ways:
//! directly over the triples near the hyperplane, as the Fourier integral
//! `integral Theta(t) S_1(l1 t) S_1(l2 t) S_4(l3 t) e(eta t) dt` split at
//! `Delta` and `H` with a closed-form tail bound, and through the smooth main
//! term `B(X)` with the prime sums replaced by their integrals.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::expsums::ExpSum;
use crate::numeric::quad::gauss_legendre;
use crate::numeric::sum::{pairwise_sum, par_pairwise_sum, PairwiseAccumulator};
use crate::numeric::{cf_convergents, iroot_floor, unit_exp, Convergent, HighPrecisionReal};
use crate::primes::{is_ps_prime, sieve_ps_table, GammaType, PsPrimeTable};
use crate::smoothing::SmoothingKernel;

/// Default number of integrand evaluations for [`gamma_via_integral`].
pub const DEFAULT_QUAD_BUDGET: u64 = 10_000_000;

/// Coefficients and exponents of one instance of the inequality.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub lambda1: HighPrecisionReal,
    pub lambda2: HighPrecisionReal,
    pub lambda3: f64,
    pub eta: f64,
    pub gamma: GammaType,
    /// The exponent slack theta added to `(219 - 220 gamma) / 208`.
    pub theta_exp: f64,
    pub lambda0: f64,
    l1: f64,
    l2: f64,
}

/// `lambda0` against `min(l1 / 4|l3|, l2 / 4|l3|, 1/16)`, evaluated as written.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lambda0Check {
    pub lambda0: f64,
    pub bound: f64,
    pub admissible: bool,
    /// The bound is `<= 0`, which happens when l1 or l2 is negative.
    pub bound_nonpositive: bool,
}

impl ProblemSpec {
    pub fn new(
        lambda1: HighPrecisionReal,
        lambda2: HighPrecisionReal,
        lambda3: f64,
        eta: f64,
        gamma: GammaType,
        theta_exp: f64,
        lambda0: f64,
    ) -> Result<Self> {
        let (l1, l2) = (lambda1.to_f64(), lambda2.to_f64());
        let spec = ProblemSpec { lambda1, lambda2, lambda3, eta, gamma, theta_exp, lambda0, l1, l2 };
        spec.validate()?;
        Ok(spec)
    }

    pub fn l1(&self) -> f64 {
        self.l1
    }

    pub fn l2(&self) -> f64 {
        self.l2
    }

    pub fn validate(&self) -> Result<()> {
        let (l1, l2, l3) = (self.l1(), self.l2(), self.lambda3);
        for (name, v) in [("lambda1", l1), ("lambda2", l2), ("lambda3", l3)] {
            if v == 0.0 || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} must be a nonzero finite number")));
            }
        }
        if (l1 > 0.0) == (l2 > 0.0) && (l2 > 0.0) == (l3 > 0.0) {
            return Err(Error::InvalidInput("lambda1, lambda2, lambda3 must not all have the same sign".into()));
        }
        if !self.eta.is_finite() {
            return Err(Error::InvalidInput("eta must be finite".into()));
        }
        if !(self.theta_exp > 0.0 && self.theta_exp.is_finite()) {
            return Err(Error::InvalidInput(format!("theta = {} must be positive", self.theta_exp)));
        }
        if !(self.lambda0 > 0.0 && self.lambda0 < 1.0) {
            return Err(Error::InvalidInput(format!("lambda0 = {} must lie in (0, 1)", self.lambda0)));
        }
        Ok(())
    }

    /// Whether `lambda1 / lambda2` is certified irrational: rational pairs
    /// never are, truncated decimals cannot be certified, and otherwise the
    /// quotient must yield 40 certified partial quotients.
    pub fn ratio_is_irrational(&self) -> bool {
        use HighPrecisionReal::*;
        match (&self.lambda1, &self.lambda2) {
            (Rational(_), Rational(_)) | (Approx { .. }, _) | (_, Approx { .. }) => false,
            _ => self.ratio_convergents(40).is_ok(),
        }
    }

    /// The first `n` convergents of `lambda1 / lambda2`.
    pub fn ratio_convergents(&self, n: usize) -> Result<Vec<Convergent>> {
        let ratio = match (&self.lambda1, &self.lambda2) {
            (HighPrecisionReal::Surd { a, b, d, c }, HighPrecisionReal::Rational(r)) => {
                // (a + b sqrt d) / (c r) stays an exact surd
                let (rn, rd) = (r.numer().clone(), r.denom().clone());
                HighPrecisionReal::surd(a * &rd, b * &rd, d.clone(), c * rn)?
            }
            _ => self.lambda1.div(&self.lambda2, (16 * n as u32).max(128))?,
        };
        cf_convergents(&ratio, n)
    }

    pub fn lambda0_check(&self) -> Lambda0Check {
        let a3 = 4.0 * self.lambda3.abs();
        let bound = (self.l1() / a3).min(self.l2() / a3).min(1.0 / 16.0);
        Lambda0Check {
            lambda0: self.lambda0,
            bound,
            admissible: self.lambda0 < bound,
            bound_nonpositive: bound <= 0.0,
        }
    }

    fn value(&self, p1: u64, p2: u64, p3: u64) -> f64 {
        self.l1() * p1 as f64 + self.l2() * p2 as f64 + self.lambda3 * (p3 as f64).powi(4) + self.eta
    }
}

/// The scale X and the schedule derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunParams {
    /// Convergent denominator the scale came from; absent when X was given directly.
    pub q0: Option<u64>,
    pub x: f64,
    pub delta: f64,
    pub eps: f64,
    pub h: f64,
    pub smoothing_k: u32,
}

impl RunParams {
    pub fn kernel(&self) -> Result<SmoothingKernel> {
        SmoothingKernel::new(self.eps, self.smoothing_k)
    }
}

/// `(219 - 220 gamma) / 208 + theta`.
pub fn eps_exponent(gamma: &GammaType, theta: f64) -> f64 {
    (219.0 - 220.0 * gamma.value()) / 208.0 + theta
}

/// Exact `q0^(13/6)` when q0 is a perfect sixth power that fits.
fn exact_scale(q0: u64) -> Option<(f64, u64)> {
    let r = iroot_floor(q0, 6);
    if (r as u128).pow(6) != q0 as u128 {
        return None;
    }
    let x = (r as u128).checked_pow(13)?;
    (x < 1u128 << 53).then_some((x as f64, r))
}

/// `X = q0^(13/6)`, `Delta = X^(-12/13) ln X`, `eps = X^((219-220g)/208 + theta)`,
/// `H = ln^2 X / eps`, `k = max(1, floor(ln X))`.
pub fn derive_params(q0: u64, spec: &ProblemSpec) -> Result<RunParams> {
    if q0 < 2 {
        return Err(Error::InvalidInput(format!("q0 = {q0} must be >= 2")));
    }
    let (x, small) = match exact_scale(q0) {
        Some((x, r)) => (x, Some((r as f64).powi(-12))),
        None => ((q0 as f64).powf(13.0 / 6.0), None),
    };
    let mut p = params_for_x(x, spec)?;
    p.q0 = Some(q0);
    if let Some(s) = small {
        p.delta = s * x.ln();
    }
    Ok(p)
}

/// The same schedule for a directly chosen X.
pub fn params_for_x(x: f64, spec: &ProblemSpec) -> Result<RunParams> {
    if !(x > 1.0 && x.is_finite()) {
        return Err(Error::InvalidInput(format!("X = {x} must exceed 1")));
    }
    let lx = x.ln();
    let eps = (eps_exponent(&spec.gamma, spec.theta_exp) * lx).exp();
    Ok(RunParams {
        q0: None,
        x,
        delta: (-12.0 / 13.0 * lx).exp() * lx,
        eps,
        h: lx * lx / eps,
        smoothing_k: (lx.floor() as u32).max(1),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripleSolution {
    pub p1: u64,
    pub p2: u64,
    pub p3: u64,
    pub value: f64,
}

/// The three PS-prime tables of one instance.
#[derive(Debug, Clone)]
pub struct TripleTables {
    pub t1: PsPrimeTable,
    pub t2: PsPrimeTable,
    pub t4: PsPrimeTable,
}

pub fn build_tables(spec: &ProblemSpec, x: f64) -> Result<TripleTables> {
    let t1 = sieve_ps_table(x, spec.lambda0, 1, spec.gamma)?;
    let t4 = sieve_ps_table(x, spec.lambda0, 4, spec.gamma)?;
    for (name, t) in [("p1, p2", &t1), ("p3", &t4)] {
        if t.is_empty() {
            return Err(Error::RangeEmpty(format!("no PS primes for {name} at X = {x}")));
        }
    }
    Ok(TripleTables { t2: t1.clone(), t1, t4 })
}

/// Index triples `(i1, i2, i3)` with `|value| < tol`, sorted by prime.
/// For each `(p1, p3)` the admissible p2 form a window of the sorted
/// `l2 p2` values, found by binary search.
fn window_triples(spec: &ProblemSpec, tables: &TripleTables, tol: f64) -> Vec<(usize, usize, usize, f64)> {
    let (l1, l2, l3) = (spec.l1(), spec.l2(), spec.lambda3);
    let mut by_value: Vec<(f64, usize)> = tables.t2.primes.iter().enumerate().map(|(i, &p)| (l2 * p as f64, i)).collect();
    by_value.sort_by(|a, b| a.0.total_cmp(&b.0));
    let p3_terms: Vec<f64> = tables.t4.primes.iter().map(|&p| l3 * (p as f64).powi(4)).collect();
    let mut out: Vec<(usize, usize, usize, f64)> = tables
        .t1
        .primes
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i1, &p1)| {
            let mut local = Vec::new();
            for (i3, &c3) in p3_terms.iter().enumerate() {
                let c = l1 * p1 as f64 + c3 + spec.eta;
                // slightly widened window, then the exact test below
                let slack = 1e-9 * (1.0 + c.abs());
                let lo = -c - tol - slack;
                let hi = -c + tol + slack;
                let start = by_value.partition_point(|e| e.0 < lo);
                for &(_, i2) in by_value[start..].iter().take_while(|e| e.0 <= hi) {
                    let v = spec.value(p1, tables.t2.primes[i2], tables.t4.primes[i3]);
                    if v.abs() < tol {
                        local.push((i1, i2, i3, v));
                    }
                }
            }
            local
        })
        .collect();
    out.sort_by_key(|e| (e.0, e.1, e.2));
    out
}

/// Solutions of `|l1 p1 + l2 p2 + l3 p3^4 + eta| < tol` in PS primes with
/// `lambda0 X < p1, p2, p3^4 <= X`, sorted by `(p1, p2, p3)`, at most `limit`.
pub fn find_triples(spec: &ProblemSpec, x: f64, tol: f64, limit: Option<usize>) -> Result<Vec<TripleSolution>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance {tol} must be positive")));
    }
    let tables = build_tables(spec, x)?;
    let mut out: Vec<TripleSolution> = window_triples(spec, &tables, tol)
        .into_iter()
        .map(|(i1, i2, i3, value)| TripleSolution {
            p1: tables.t1.primes[i1],
            p2: tables.t2.primes[i2],
            p3: tables.t4.primes[i3],
            value,
        })
        .collect();
    if let Some(n) = limit {
        out.truncate(n);
    }
    Ok(out)
}

/// Re-check one solution from scratch: PS membership, range and tolerance.
pub fn validate_triple(spec: &ProblemSpec, x: f64, tol: f64, s: &TripleSolution) -> Result<bool> {
    let lo = spec.lambda0 * x;
    let in_range = |v: f64| lo < v && v <= x;
    Ok(is_ps_prime(s.p1, &spec.gamma)?
        && is_ps_prime(s.p2, &spec.gamma)?
        && is_ps_prime(s.p3, &spec.gamma)?
        && in_range(s.p1 as f64)
        && in_range(s.p2 as f64)
        && in_range((s.p3 as f64).powi(4))
        && spec.value(s.p1, s.p2, s.p3).abs() < tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaDirect {
    pub value: f64,
    /// Triples with `|l1 p1 + l2 p2 + l3 p3^4 + eta| < eps`, the support of theta.
    pub support: usize,
}

/// `Gamma(X)` summed over the triples inside the support of theta.
pub fn gamma_direct(spec: &ProblemSpec, params: &RunParams) -> Result<GammaDirect> {
    let kernel = params.kernel()?;
    let tables = match build_tables(spec, params.x) {
        Ok(t) => t,
        Err(Error::RangeEmpty(_)) => return Ok(GammaDirect { value: 0.0, support: 0 }),
        Err(e) => return Err(e),
    };
    let hits = window_triples(spec, &tables, kernel.eps);
    let terms: Vec<f64> = hits
        .iter()
        .map(|&(i1, i2, i3, v)| kernel.theta(v) * tables.t1.weights[i1] * tables.t2.weights[i2] * tables.t4.weights[i3])
        .collect();
    Ok(GammaDirect {
        value: pairwise_sum(&terms),
        support: hits.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaIntegral {
    /// Integral over `|t| < Delta`.
    pub gamma1: Complex64,
    /// Integral over `Delta <= |t| <= H`.
    pub gamma2: Complex64,
    /// Bound on the tail `|t| > H`.
    pub gamma3_bound: f64,
    /// `Re(gamma1 + gamma2)`; the true Gamma lies within `gamma3_bound` of it
    /// up to quadrature error.
    pub total: f64,
    /// `|Im(gamma1 + gamma2)|`, zero for the exact integral.
    pub imag_diagnostic: f64,
    pub evaluations: u64,
}

/// Panels of width at most `wmax` covering `[a, b]`.
fn panel_count(a: f64, b: f64, wmax: f64) -> u64 {
    ((b - a) / wmax).ceil().max(1.0) as u64
}

/// `Gamma_1 + Gamma_2` by composite 4-point Gauss-Legendre on panels of width
/// at most `1 / (8 max|l_i| X)`, and the tail `|t| > H` bounded by
/// `(2/pi) W1 W2 W4 (1/k) (4k / (pi eps H))^k` with `W` the total weights.
pub fn gamma_via_integral(spec: &ProblemSpec, params: &RunParams, quad_budget: u64) -> Result<GammaIntegral> {
    let kernel = params.kernel()?;
    let tables = build_tables(spec, params.x)?;
    let (l1, l2, l3) = (spec.l1(), spec.l2(), spec.lambda3);
    let lmax = l1.abs().max(l2.abs()).max(l3.abs());
    let wmax = 1.0 / (8.0 * lmax * params.x);
    let (delta, h) = (params.delta, params.h);
    if !(h > delta) {
        return Err(Error::InvalidInput(format!("H = {h} must exceed Delta = {delta}")));
    }
    let segments = [(-h, -delta), (-delta, delta), (delta, h)];
    let counts: Vec<u64> = segments.iter().map(|&(a, b)| panel_count(a, b, wmax)).collect();
    let needed = 4 * counts.iter().sum::<u64>();
    if needed > quad_budget {
        return Err(Error::BudgetExceeded { needed, budget: quad_budget });
    }
    let sums = [
        ExpSum { freqs: tables.t1.primes.clone(), coefs: tables.t1.weights.clone() },
        ExpSum { freqs: tables.t2.primes.clone(), coefs: tables.t2.weights.clone() },
        ExpSum { freqs: tables.t4.primes.iter().map(|&p| p.pow(4)).collect(), coefs: tables.t4.weights.clone() },
    ];
    let scales = [l1, l2, l3];
    let (nodes, weights) = gauss_legendre(4);
    let mut parts = [Complex64::new(0.0, 0.0); 3];
    for (s, (&(a, b), &n)) in segments.iter().zip(&counts).enumerate() {
        let w = (b - a) / n as f64;
        let mut acc = PairwiseAccumulator::new();
        for (xi, wi) in nodes.iter().zip(&weights) {
            let t0 = a + 0.5 * w * (1.0 + xi);
            let n = n as usize;
            let vals: Vec<Vec<Complex64>> = sums.iter().zip(&scales).map(|(e, &l)| e.sweep(l * t0, l * w, n)).collect();
            let terms: Vec<Complex64> = (0..n)
                .into_par_iter()
                .map(|j| {
                    let t = t0 + j as f64 * w;
                    vals[0][j] * vals[1][j] * vals[2][j] * unit_exp(spec.eta * t) * (kernel.theta_fourier(t) * wi * 0.5 * w)
                })
                .collect();
            acc.push(par_pairwise_sum(&terms));
        }
        parts[s] = acc.total();
    }
    let gamma1 = parts[1];
    let gamma2 = parts[0] + parts[2];
    let mass = tables.t1.total_weight() * tables.t2.total_weight() * tables.t4.total_weight();
    let gamma3_bound = mass * (2.0 / PI) * kernel.theta_tail_mass(h);
    let sum = gamma1 + gamma2;
    Ok(GammaIntegral {
        gamma1,
        gamma2,
        gamma3_bound,
        total: sum.re,
        imag_diagnostic: sum.im.abs(),
        evaluations: needed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MainTerm {
    pub b: f64,
    /// `B / (eps X^(5/4))`.
    pub ratio: f64,
    pub lambda0: Lambda0Check,
}

/// `B(X) = g^3 integral Theta(t) I_1(l1 t) I_1(l2 t) I_4(l3 t) e(eta t) dt`.
///
/// By Fourier inversion this equals `g^3` times the volume integral of
/// `theta(l1 y1 + l2 y2 + l3 y3^4 + eta)` over the box
/// `A < y1, y2, y3^4 <= X`, `A = lambda0 X`. The y1 and y2 integrals are done
/// in closed form with the second antiderivative `Phi2` of theta:
///
/// ```text
/// K(c) = (Phi2(c + l1 X + l2 X) - Phi2(c + l1 A + l2 X) - Phi2(c + l1 X + l2 A) + Phi2(c + l1 A + l2 A)) / (l1 l2)
/// ```
///
/// and the remaining y3 integral by Gauss-Legendre between the points where
/// some corner argument crosses `+-eps`.
///
/// An inadmissible `lambda0` raises `InadmissibleLambda0` unless `allow_inadmissible`.
pub fn main_term_b(spec: &ProblemSpec, params: &RunParams, allow_inadmissible: bool) -> Result<MainTerm> {
    let check = spec.lambda0_check();
    if !check.admissible && !allow_inadmissible {
        return Err(Error::InadmissibleLambda0 { lambda0: spec.lambda0, bound: check.bound });
    }
    let kernel = params.kernel()?;
    let b = spec.gamma.value().powi(3) * box_integral(spec, params.x, &kernel);
    Ok(MainTerm {
        b,
        ratio: b / (params.eps * params.x.powf(1.25)),
        lambda0: check,
    })
}

/// `integral over the box of theta(l1 y1 + l2 y2 + l3 y3^4 + eta)`.
pub fn box_integral(spec: &ProblemSpec, x: f64, kernel: &SmoothingKernel) -> f64 {
    let (l1, l2, l3) = (spec.l1(), spec.l2(), spec.lambda3);
    let a = spec.lambda0 * x;
    let corners = [(l1 * x + l2 * x, 1.0), (l1 * a + l2 * x, -1.0), (l1 * x + l2 * a, -1.0), (l1 * a + l2 * a, 1.0)];
    let k_of = |c: f64| -> f64 {
        let s: f64 = corners.iter().map(|&(off, sign)| sign * kernel.theta_double_integral(c + off)).sum();
        s / (l1 * l2)
    };
    let (ylo, yhi) = (a.powf(0.25), x.powf(0.25));
    let mut breaks = vec![ylo, yhi];
    for &(off, _) in &corners {
        for edge in [-kernel.eps, kernel.eps] {
            let u = (edge - spec.eta - off) / l3;
            if u > 0.0 {
                let y = u.powf(0.25);
                if y > ylo && y < yhi {
                    breaks.push(y);
                }
            }
        }
    }
    breaks.sort_by(|p, q| p.total_cmp(q));
    let (nodes, weights) = gauss_legendre(20);
    let mut pieces = Vec::new();
    for seg in breaks.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        if hi <= lo {
            continue;
        }
        const PANELS: usize = 16;
        let w = (hi - lo) / PANELS as f64;
        for p in 0..PANELS {
            let left = lo + p as f64 * w;
            let mut acc = 0.0;
            for (xi, wi) in nodes.iter().zip(&weights) {
                let y = left + 0.5 * w * (1.0 + xi);
                acc += wi * k_of(l3 * y.powi(4) + spec.eta);
            }
            pieces.push(0.5 * w * acc);
        }
    }
    pairwise_sum(&pieces)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hp(s: &str) -> HighPrecisionReal {
        HighPrecisionReal::parse(s).unwrap()
    }

    fn integer_spec() -> ProblemSpec {
        ProblemSpec::new(hp("1"), hp("1"), -2.0, 0.0, GammaType::new(0.9).unwrap(), 0.05, 1e-4).unwrap()
    }

    fn sqrt2_spec(lambda0: f64) -> ProblemSpec {
        ProblemSpec::new(hp("sqrt:2"), hp("1"), -1.0, 0.3, GammaType::new(0.97).unwrap(), 0.05, lambda0).unwrap()
    }

    fn brute_triples(spec: &ProblemSpec, x: f64, tol: f64) -> Vec<TripleSolution> {
        let t = build_tables(spec, x).unwrap();
        let mut out = Vec::new();
        for &p1 in &t.t1.primes {
            for &p2 in &t.t2.primes {
                for &p3 in &t.t4.primes {
                    let value = spec.value(p1, p2, p3);
                    if value.abs() < tol {
                        out.push(TripleSolution { p1, p2, p3, value });
                    }
                }
            }
        }
        out
    }

    #[test]
    fn schedule_examples() {
        let spec = sqrt2_spec(0.05);
        let p = derive_params(64, &spec).unwrap();
        assert_eq!(p.x, 8192.0);
        assert!((p.delta / (8192f64.ln() / 4096.0) - 1.0).abs() < 1e-15);
        assert!((p.delta - 2.19993e-3).abs() < 1e-8);
        assert_eq!(p.smoothing_k, 9);
        let edge = ProblemSpec { gamma: GammaType::from_ratio(219, 220).unwrap(), ..spec.clone() };
        assert!((eps_exponent(&edge.gamma, 0.05) - 0.05).abs() < 1e-15);
        assert_eq!(derive_params(64, &spec).unwrap(), p);
        assert!(derive_params(1, &spec).is_err());
        assert!(derive_params(10, &spec).unwrap().x > 0.0);
    }

    #[test]
    fn spec_validation() {
        let g = GammaType::new(0.9).unwrap();
        assert!(ProblemSpec::new(hp("1"), hp("2"), 3.0, 0.0, g, 0.1, 0.1).is_err());
        assert!(ProblemSpec::new(hp("0"), hp("2"), -3.0, 0.0, g, 0.1, 0.1).is_err());
        assert!(ProblemSpec::new(hp("1"), hp("2"), -3.0, 0.0, g, 0.0, 0.1).is_err());
        assert!(sqrt2_spec(0.05).ratio_is_irrational());
        assert!(!integer_spec().ratio_is_irrational());
        let conv = sqrt2_spec(0.05).ratio_convergents(4).unwrap();
        let shown: Vec<String> = conv.iter().map(|c| c.to_string()).collect();
        assert_eq!(shown, ["1/1", "3/2", "7/5", "17/12"]);
        let neg = ProblemSpec::new(hp("-1"), hp("2"), 3.0, 0.0, g, 0.1, 0.01).unwrap();
        let c = neg.lambda0_check();
        assert!(c.bound_nonpositive && !c.admissible);
        let c = sqrt2_spec(0.05).lambda0_check();
        assert!(c.admissible && (c.bound - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn solver_matches_brute_force() {
        let spec = integer_spec();
        let got = find_triples(&spec, 1e4, 0.5, None).unwrap();
        assert_eq!(got, brute_triples(&spec, 1e4, 0.5));
        assert!(got.iter().any(|s| (s.p1, s.p2, s.p3) == (3, 29, 2)));
        for s in &got {
            assert!(validate_triple(&spec, 1e4, 0.5, s).unwrap());
        }
        assert_eq!(find_triples(&spec, 1e4, 0.5, Some(3)).unwrap(), got[..3].to_vec());
        let spec = sqrt2_spec(0.1);
        for tol in [0.01, 0.3, 2.0] {
            assert_eq!(find_triples(&spec, 3000.0, tol, None).unwrap(), brute_triples(&spec, 3000.0, tol));
        }
    }

    #[test]
    fn solver_trivial_regimes() {
        let g = GammaType::new(0.9).unwrap();
        // mixed signs are required, so make the p3 term positive and small
        let spec = ProblemSpec::new(hp("1"), hp("1"), -1e-9, 5.0, g, 0.1, 0.1).unwrap();
        assert!(find_triples(&spec, 1e4, 1.0, None).unwrap().is_empty());
        let t = build_tables(&spec, 1e4).unwrap();
        let all = find_triples(&spec, 1e4, 1e12, None).unwrap();
        assert_eq!(all.len(), t.t1.len() * t.t2.len() * t.t4.len());
        assert!(matches!(find_triples(&spec, 10.0, 1.0, None), Err(Error::RangeEmpty(_))));
    }

    #[test]
    fn gamma_direct_matches_brute_force() {
        let spec = sqrt2_spec(0.1);
        let params = params_for_x(2000.0, &spec).unwrap();
        let kernel = params.kernel().unwrap();
        let t = build_tables(&spec, 2000.0).unwrap();
        let mut brute = 0.0;
        for (&p1, &w1) in t.t1.primes.iter().zip(&t.t1.weights) {
            for (&p2, &w2) in t.t2.primes.iter().zip(&t.t2.weights) {
                for (&p3, &w3) in t.t4.primes.iter().zip(&t.t4.weights) {
                    brute += kernel.theta(spec.value(p1, p2, p3)) * w1 * w2 * w3;
                }
            }
        }
        let d = gamma_direct(&spec, &params).unwrap();
        assert!(d.value >= 0.0);
        assert!((d.value - brute).abs() <= 1e-10 * brute.abs(), "{} {brute}", d.value);
        let nonempty = !find_triples(&spec, 2000.0, params.eps, None).unwrap().is_empty();
        assert_eq!(d.value > 0.0, nonempty);
        let mut tiny = params;
        tiny.x = 10.0;
        assert_eq!(gamma_direct(&spec, &tiny).unwrap().value, 0.0);
    }

    #[test]
    fn kernel_of_box_matches_quadrature() {
        // the closed-form y1, y2 integral against brute-force 2D quadrature
        let spec = sqrt2_spec(0.3);
        let x = 20.0;
        let kernel = SmoothingKernel::new(1.5, 4).unwrap();
        let (l1, l2) = (spec.l1(), spec.l2());
        let a = spec.lambda0 * x;
        let (nodes, weights) = gauss_legendre(8);
        let n = 400;
        let h = (x - a) / n as f64;
        for &c in &[-40.0, -35.3, -30.0, -25.1, -15.0] {
            let mut brute = 0.0;
            for i in 0..n {
                for (xi, wi) in nodes.iter().zip(&weights) {
                    let y1 = a + h * (i as f64 + 0.5 * (1.0 + xi));
                    // exact y2 integral through the first antiderivative
                    let inner = (kernel.theta_integral(l1 * y1 + l2 * x + c) - kernel.theta_integral(l1 * y1 + l2 * a + c)) / l2;
                    brute += 0.5 * h * wi * inner;
                }
            }
            let corners = [(l1 * x + l2 * x, 1.0), (l1 * a + l2 * x, -1.0), (l1 * x + l2 * a, -1.0), (l1 * a + l2 * a, 1.0)];
            let closed: f64 = corners.iter().map(|&(o, s)| s * kernel.theta_double_integral(c + o)).sum::<f64>() / (l1 * l2);
            assert!((closed - brute).abs() < 1e-7 * (1.0 + brute.abs()), "c={c} {closed} {brute}");
        }
    }

    #[test]
    fn box_integral_matches_nested_quadrature() {
        let spec = sqrt2_spec(0.3);
        let x = 20.0;
        let kernel = SmoothingKernel::new(1.5, 4).unwrap();
        let (l1, l2, l3) = (spec.l1(), spec.l2(), spec.lambda3);
        let a = spec.lambda0 * x;
        let (nodes, weights) = gauss_legendre(6);
        let (ylo, yhi) = (a.powf(0.25), x.powf(0.25));
        let (n1, n3) = (300, 300);
        let (h1, h3) = ((x - a) / n1 as f64, (yhi - ylo) / n3 as f64);
        let mut brute = 0.0;
        for i3 in 0..n3 {
            for (x3, w3) in nodes.iter().zip(&weights) {
                let y3 = ylo + h3 * (i3 as f64 + 0.5 * (1.0 + x3));
                let c = l3 * y3.powi(4) + spec.eta;
                for i1 in 0..n1 {
                    for (x1, w1) in nodes.iter().zip(&weights) {
                        let y1 = a + h1 * (i1 as f64 + 0.5 * (1.0 + x1));
                        let inner = (kernel.theta_integral(l1 * y1 + l2 * x + c) - kernel.theta_integral(l1 * y1 + l2 * a + c)) / l2;
                        brute += 0.25 * h1 * h3 * w1 * w3 * inner;
                    }
                }
            }
        }
        let got = box_integral(&spec, x, &kernel);
        assert!(brute > 0.0);
        assert!((got - brute).abs() < 1e-6 * brute, "{got} {brute}");
    }

    #[test]
    fn main_term_policy() {
        let spec = sqrt2_spec(0.1);
        let params = params_for_x(1e4, &spec).unwrap();
        assert!(matches!(main_term_b(&spec, &params, false), Err(Error::InadmissibleLambda0 { .. })));
        let m = main_term_b(&spec, &params, true).unwrap();
        assert!(!m.lambda0.admissible);
        let spec = sqrt2_spec(0.05);
        let m = main_term_b(&spec, &params, false).unwrap();
        assert!(m.ratio > 0.0, "{m:?}");
    }
}
