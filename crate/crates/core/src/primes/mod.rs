//! Piatetski-Shapiro primes of type gamma: primes `p = [n^(1/gamma)]`.
//!
//! Membership is decided on the prime side: `p` qualifies exactly when the
//! interval `[p^gamma, (p+1)^gamma)` contains an integer, i.e. when
//! `[-p^gamma] - [-(p+1)^gamma] = 1`. Both powers are computed in double
//! precision with a guard band; values too close to an integer are settled by
//! exact big-integer comparison using the rational form of gamma.

mod sieve;

pub use sieve::{primes_in_range, small_primes};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{guarded_floor, iroot_ceil, iroot_floor, is_prime, GuardedReal};

/// Absolute guard below which a double-precision power is never trusted.
pub const GUARD_FLOOR: f64 = 1e-12;

/// Largest exact power (in bits) the big-integer fallback will build.
const EXACT_BITS_CAP: f64 = (1u64 << 22) as f64;

/// The exponent gamma in (0, 1), with its rational form when it has a short
/// decimal expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaType {
    value: f64,
    #[serde(skip)]
    exact: Option<(u64, u64)>,
}

impl GammaType {
    pub fn new(value: f64) -> Result<Self> {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::InvalidGamma(value));
        }
        Ok(GammaType {
            value,
            exact: shortest_decimal_ratio(value),
        })
    }

    /// gamma = num/den exactly.
    pub fn from_ratio(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num == 0 || num >= den {
            return Err(Error::InvalidGamma(num as f64 / den.max(1) as f64));
        }
        let g = num_integer::gcd(num, den);
        Ok(GammaType {
            value: num as f64 / den as f64,
            exact: Some((num / g, den / g)),
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact(&self) -> Option<(u64, u64)> {
        self.exact
    }

    /// Whether gamma lies in (219/220, 1), the range of the main theorem.
    /// Informational only.
    pub fn in_theorem_range(&self) -> bool {
        match self.exact {
            Some((a, b)) => 220 * a as u128 > 219 * b as u128,
            None => self.value > 219.0 / 220.0,
        }
    }
}

fn shortest_decimal_ratio(v: f64) -> Option<(u64, u64)> {
    let s = format!("{v}");
    let frac = s.strip_prefix("0.")?;
    if frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let num: u64 = frac.parse().ok()?;
    let den = 10u64.pow(frac.len() as u32);
    let g = num_integer::gcd(num, den);
    Some((num / g, den / g))
}

/// Smallest integer n with n^den >= base^num, searched near `approx`.
fn exact_ceil_root_power(base: u64, num: u64, den: u64, approx: f64) -> Result<u64> {
    let bits = num as f64 * (base as f64 + 1.0).log2();
    if bits > EXACT_BITS_CAP {
        return Err(Error::AmbiguousFloor {
            value: approx,
            guard: 0.0,
        });
    }
    let target = BigUint::from(base).pow(num as u32);
    let reaches = |n: u64| BigUint::from(n).pow(den as u32) >= target;
    let mut n = (approx.round() as u64).saturating_sub(1).max(1);
    while n > 1 && reaches(n) {
        n -= 1;
    }
    while !reaches(n) {
        n += 1;
    }
    Ok(n)
}

/// Largest integer p with p^num <= n^den, searched near `approx`.
pub(crate) fn exact_floor_root_power(n: u64, num: u64, den: u64, approx: f64) -> Result<u64> {
    let bits = den as f64 * (n as f64 + 1.0).log2();
    if bits > EXACT_BITS_CAP {
        return Err(Error::AmbiguousFloor {
            value: approx,
            guard: 0.0,
        });
    }
    let target = BigUint::from(n).pow(den as u32);
    let within = |p: u64| BigUint::from(p).pow(num as u32) <= target;
    let mut p = approx.round() as u64 + 1;
    while !within(p) {
        p -= 1;
    }
    while within(p + 1) {
        p += 1;
    }
    Ok(p)
}

/// Certified `ceil(m^gamma)` together with the double-precision value of `m^gamma`.
pub fn ceil_pow(m: u64, gamma: &GammaType) -> Result<(u64, f64)> {
    let v = (m as f64).powf(gamma.value);
    let g = GuardedReal::from_libm(v, GUARD_FLOOR);
    match guarded_floor(g) {
        Ok(f) => Ok((f as u64 + 1, v)),
        Err(e) => match gamma.exact {
            Some((a, b)) => Ok((exact_ceil_root_power(m, a, b, v)?, v)),
            None => Err(e),
        },
    }
}

/// The Piatetski-Shapiro indicator `[-p^gamma] - [-(p+1)^gamma]`, which is 0 or 1.
pub fn ps_indicator(p: u64, gamma: &GammaType) -> Result<u64> {
    let (lo, _) = ceil_pow(p, gamma)?;
    let (hi, _) = ceil_pow(p + 1, gamma)?;
    Ok(hi - lo)
}

/// Whether `p` is a prime of the form `[n^(1/gamma)]`.
pub fn is_ps_prime(p: u64, gamma: &GammaType) -> Result<bool> {
    Ok(is_prime(p) && ps_indicator(p, gamma)? == 1)
}

/// Integer range of `p` satisfying `lambda0*X < p^k <= X`, or `None`.
pub fn power_range(x: f64, lambda0: f64, k: u32) -> Option<(u64, u64)> {
    if !(x >= 1.0) {
        return None;
    }
    let hi_pow = x.floor() as u64;
    let lo_excl = (lambda0 * x).floor().max(0.0) as u64;
    let p_min = iroot_ceil(lo_excl + 1, k);
    let p_max = iroot_floor(hi_pow, k);
    (p_min <= p_max).then_some((p_min, p_max))
}

/// Sorted primes with `lambda0*X < p^k <= X` and their weights `p^(1-gamma) ln p`.
#[derive(Debug, Clone, Serialize)]
pub struct PsPrimeTable {
    pub gamma: GammaType,
    pub k: u32,
    pub x: f64,
    pub lambda0: f64,
    pub primes: Vec<u64>,
    pub weights: Vec<f64>,
}

impl PsPrimeTable {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// `S_k(0)`: the total weight.
    pub fn total_weight(&self) -> f64 {
        crate::numeric::sum::pairwise_sum(&self.weights)
    }
}

pub fn ps_weight(p: u64, gamma: &GammaType) -> f64 {
    let pf = p as f64;
    pf.powf(1.0 - gamma.value) * pf.ln()
}

fn validate_scale(x: f64, lambda0: f64) -> Result<()> {
    if !(x >= 2.0) || !x.is_finite() {
        return Err(Error::InvalidInput(format!("X = {x} must be >= 2")));
    }
    if !(lambda0 > 0.0 && lambda0 < 1.0) {
        return Err(Error::InvalidInput(format!("lambda0 = {lambda0} must lie in (0, 1)")));
    }
    Ok(())
}

/// Keep the primes passing the PS test, in order.
pub fn filter_ps(primes: &[u64], gamma: &GammaType) -> Result<Vec<u64>> {
    let flags: Vec<Result<bool>> = primes
        .par_iter()
        .map(|&p| ps_indicator(p, gamma).map(|i| i == 1))
        .collect();
    let mut out = Vec::new();
    for (&p, f) in primes.iter().zip(flags) {
        if f? {
            out.push(p);
        }
    }
    Ok(out)
}

/// Build the table of PS primes of type gamma with `lambda0*X < p^k <= X`.
pub fn sieve_ps_table(x: f64, lambda0: f64, k: u32, gamma: GammaType) -> Result<PsPrimeTable> {
    validate_scale(x, lambda0)?;
    if !(1..=4).contains(&k) {
        return Err(Error::InvalidInput(format!("power k = {k} must be in 1..=4")));
    }
    let (lo, hi) = power_range(x, lambda0, k)
        .ok_or_else(|| Error::RangeEmpty(format!("no integer p with {}<p^{k}<={x}", lambda0 * x)))?;
    let primes = filter_ps(&primes_in_range(lo, hi), &gamma)?;
    let weights = primes.iter().map(|&p| ps_weight(p, &gamma)).collect();
    Ok(PsPrimeTable {
        gamma,
        k,
        x,
        lambda0,
        primes,
        weights,
    })
}

/// All primes (no PS restriction) with `lambda0*X < p^k <= X`.
pub fn prime_range(x: f64, lambda0: f64, k: u32) -> Vec<u64> {
    match power_range(x, lambda0, k) {
        Some((lo, hi)) => primes_in_range(lo, hi),
        None => Vec::new(),
    }
}

/// PS primes of type gamma up to `x` inclusive.
pub fn ps_primes_upto(x: u64, gamma: &GammaType) -> Result<Vec<u64>> {
    filter_ps(&primes_in_range(2, x), gamma)
}

/// The first `n` PS primes of type gamma.
pub fn first_ps_primes(n: usize, gamma: &GammaType) -> Result<Vec<u64>> {
    let mut limit = 64u64.max(4 * n as u64);
    loop {
        let found = ps_primes_upto(limit, gamma)?;
        if found.len() >= n {
            return Ok(found[..n].to_vec());
        }
        limit *= 2;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityRow {
    pub x: f64,
    pub count: u64,
    /// `count * ln X / X^gamma`
    pub ratio: f64,
}

/// Count of PS primes up to each X, normalised by `X^gamma / ln X`.
pub fn density_report(x_list: &[f64], gamma: GammaType) -> Result<Vec<DensityRow>> {
    x_list
        .iter()
        .map(|&x| {
            if !(x >= 100.0) {
                return Err(Error::InvalidInput(format!("density needs X >= 100, got {x}")));
            }
            let count = ps_primes_upto(x.floor() as u64, &gamma)?.len() as u64;
            Ok(DensityRow {
                x,
                count,
                ratio: count as f64 * x.ln() / x.powf(gamma.value),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(v: f64) -> GammaType {
        GammaType::new(v).unwrap()
    }

    #[test]
    fn gamma_validation() {
        assert!(GammaType::new(1.2).is_err());
        assert!(GammaType::new(0.0).is_err());
        assert_eq!(g(0.95).exact(), Some((19, 20)));
        assert_eq!(g(0.9955).exact(), Some((1991, 2000)));
        assert!(g(0.9955).in_theorem_range());
        assert!(!g(0.99).in_theorem_range());
        assert!(!GammaType::from_ratio(219, 220).unwrap().in_theorem_range());
    }

    #[test]
    fn ps_examples() {
        assert!(is_ps_prime(2, &g(0.9)).unwrap());
        assert!(!is_ps_prime(13, &g(0.9)).unwrap());
        // p^g > p - 1 and (p+1)^g > p put the integer p into the interval
        let close = g(0.999999);
        for p in [2u64, 3, 5, 7, 11] {
            assert!(is_ps_prime(p, &close).unwrap());
        }
        assert!(!is_ps_prime(15, &g(0.9)).unwrap());
    }

    #[test]
    fn exact_fallback_agrees_with_doubles() {
        let gamma = g(0.95);
        for m in 2..5000u64 {
            let (c, v) = ceil_pow(m, &gamma).unwrap();
            let exact = exact_ceil_root_power(m, 19, 20, v).unwrap();
            assert_eq!(c, exact, "m={m}");
        }
        // perfect powers land exactly on integers: 2^20 -> 2^19
        let (c, _) = ceil_pow(1 << 20, &gamma).unwrap();
        assert_eq!(c, 1 << 19);
        assert_eq!(exact_floor_root_power(1 << 19, 19, 20, 1048576.0).unwrap(), 1 << 20);
    }

    #[test]
    fn table_examples() {
        let t = sieve_ps_table(100.0, 0.05, 4, g(0.9)).unwrap();
        assert_eq!(t.primes, vec![2, 3]);
        let t = sieve_ps_table(10.0, 0.99, 1, g(0.5)).unwrap();
        assert!(t.is_empty());
        assert!(matches!(sieve_ps_table(100.0, 0.9, 4, g(0.9)), Err(Error::RangeEmpty(_))));
        assert!(sieve_ps_table(100.0, 1.5, 1, g(0.9)).is_err());
    }

    #[test]
    fn table_invariants() {
        let gamma = g(0.9);
        let t = sieve_ps_table(1e4, 0.05, 1, gamma).unwrap();
        assert!(t.primes.windows(2).all(|w| w[0] < w[1]));
        for (&p, &w) in t.primes.iter().zip(&t.weights) {
            assert!(is_ps_prime(p, &gamma).unwrap());
            assert!(500 < p && p <= 10_000);
            assert!(w > 0.0);
        }
        let naive: f64 = t.primes.iter().map(|&p| ps_weight(p, &gamma)).sum();
        assert!((t.total_weight() - naive).abs() <= 1e-12 * naive);
    }

    #[test]
    fn saturation_near_one() {
        // every prime qualifies once p - 1 < p^g and (p+1)^g > p on the whole range
        let gamma = g(0.99999);
        let all = primes_in_range(2, 2000);
        assert_eq!(ps_primes_upto(2000, &gamma).unwrap(), all);
    }

    #[test]
    fn density_of_ordinary_primes() {
        // gamma -> 1 analogue: pi(10^4) = 1229
        let n = primes_in_range(2, 10_000).len();
        assert_eq!(n, 1229);
        let ratio = n as f64 * (1e4f64).ln() / 1e4;
        assert!((ratio - 1.132).abs() < 1e-3);
        let rows = density_report(&[1e4], g(0.9)).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].count as usize, ps_primes_upto(10_000, &g(0.9)).unwrap().len());
    }
}
