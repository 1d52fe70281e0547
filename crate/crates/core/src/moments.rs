//! Exact moments of `S(t) = sum_{p in P} e(t p^4)` and the integer spectra
//! behind them.
//!
//! `integral_0^1 |S(t)|^(2m) dt` counts ordered pairs of m-tuples from P with
//! equal sums of fourth powers, so every moment here is an integer computed by
//! collision counting. The b-type spectra are the Fourier coefficients of
//! `|S|^2`, `|S|^4`, `|S|^8`; the c-type spectra come from writing the same
//! powers through difference operators:
//!
//! ```text
//! c     : (p+k)^4 - p^4                      = k(4p^3 + 6p^2 k + 4p k^2 + k^3)
//! c*    : second difference in (k1, k2)      = 2 k1 k2 (6p^2 + 6p k1 + 6p k2 + 2k1^2 + 3k1 k2 + 2k2^2)
//! c-bar : third difference in (k1, k2, k3)   = 12 k1 k2 k3 (2p + k1 + k2 + k3)
//! ```

use std::collections::{BTreeMap, HashSet};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::sum::{pairwise_sum, par_pairwise_sum};
use crate::primes::{first_ps_primes, ps_primes_upto, GammaType};

/// Largest number of key pairs a spectrum convolution may materialise.
pub const MAX_CONVOLUTION_PAIRS: u64 = 20_000_000;
/// Largest |P| accepted by the third-difference spectrum.
pub const MAX_C_BAR_SIZE: usize = 60;
/// Largest |P| accepted by the sixteenth moment.
pub const MAX_M8_SIZE: usize = 12;
/// Largest `M * |P|` the sampling oracle will evaluate.
pub const MAX_QUADRATURE_WORK: u64 = 10_000_000_000;

/// Sorted, duplicate-free set of primes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeSet {
    pub primes: Vec<u64>,
}

impl PrimeSet {
    pub fn new(mut primes: Vec<u64>) -> Self {
        primes.sort_unstable();
        primes.dedup();
        PrimeSet { primes }
    }

    /// PS primes of type gamma up to X.
    pub fn upto(x: u64, gamma: &GammaType) -> Result<Self> {
        Ok(PrimeSet::new(ps_primes_upto(x, gamma)?))
    }

    /// The `n` smallest PS primes of type gamma.
    pub fn first(n: usize, gamma: &GammaType) -> Result<Self> {
        Ok(PrimeSet::new(first_ps_primes(n, gamma)?))
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    fn fourth_powers(&self) -> Result<Vec<i128>> {
        self.primes
            .iter()
            .map(|&p| (p as i128).checked_pow(4).ok_or(Error::Overflow("p^4")))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumOrder {
    B,
    C,
    BStar,
    CStar,
    BBar,
    CBar,
}

/// Sparse integer spectrum `j -> count`; only positive counts are stored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumMap {
    pub order: SpectrumOrder,
    pub entries: BTreeMap<i128, u64>,
}

impl SpectrumMap {
    fn from_keys(order: SpectrumOrder, mut keys: Vec<i128>) -> Self {
        keys.par_sort_unstable();
        let mut entries = BTreeMap::new();
        for run in keys.chunk_by(|a, b| a == b) {
            entries.insert(run[0], run.len() as u64);
        }
        SpectrumMap { order, entries }
    }

    pub fn get(&self, j: i128) -> u64 {
        self.entries.get(&j).copied().unwrap_or(0)
    }

    /// Sum of all counts.
    pub fn total(&self) -> u128 {
        self.entries.values().map(|&c| c as u128).sum()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `sum_j self_j other_j` over common keys.
    pub fn pair_with(&self, other: &SpectrumMap) -> u128 {
        let (small, large) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        small
            .entries
            .iter()
            .map(|(j, &c)| c as u128 * large.get(*j) as u128)
            .sum()
    }
}

/// Distribution of `p_1^4 + ... + p_m^4` over ordered m-tuples, as sorted
/// `(sum, count)` runs.
fn sum_spectrum(p4: &[i128], m: u32) -> Result<Vec<(i128, u64)>> {
    let base: Vec<(i128, u64)> = p4.iter().map(|&v| (v, 1)).collect();
    match m {
        1 => Ok(base),
        2 => convolve(&base, &base, 1),
        4 => {
            let r2 = convolve(&base, &base, 1)?;
            convolve(&r2, &r2, 1)
        }
        8 => {
            let r2 = convolve(&base, &base, 1)?;
            let r4 = convolve(&r2, &r2, 1)?;
            convolve(&r4, &r4, 1)
        }
        _ => Err(Error::InvalidInput(format!("tuple size {m} not in {{1, 2, 4, 8}}"))),
    }
}

/// `(a * (sign b))`: all sums `x + sign*y` with multiplicities, merged into sorted runs.
fn convolve(a: &[(i128, u64)], b: &[(i128, u64)], sign: i128) -> Result<Vec<(i128, u64)>> {
    let pairs = a.len() as u64 * b.len() as u64;
    if pairs > MAX_CONVOLUTION_PAIRS {
        return Err(Error::SizeLimit(format!(
            "spectrum convolution needs {pairs} pairs, cap is {MAX_CONVOLUTION_PAIRS}"
        )));
    }
    let mut all: Vec<(i128, u64)> = a
        .par_iter()
        .flat_map_iter(|&(x, cx)| b.iter().map(move |&(y, cy)| (x + sign * y, cx * cy)))
        .collect();
    all.par_sort_unstable_by_key(|e| e.0);
    let mut out: Vec<(i128, u64)> = Vec::new();
    for (k, c) in all {
        match out.last_mut() {
            Some((lk, lc)) if *lk == k => *lc = lc.checked_add(c).ok_or(Error::Overflow("spectrum count"))?,
            _ => out.push((k, c)),
        }
    }
    Ok(out)
}

/// b-type spectrum: ordered solutions of `(p_1^4+..+p_m^4) - (p_{m+1}^4+..+p_{2m}^4) = j`,
/// by convolving the m-fold sum spectrum with its negation.
pub fn spectrum_b(set: &PrimeSet, m: u32) -> Result<SpectrumMap> {
    let order = match m {
        1 => SpectrumOrder::B,
        2 => SpectrumOrder::BStar,
        4 => SpectrumOrder::BBar,
        _ => return Err(Error::InvalidInput(format!("b spectrum order {m} not in {{1, 2, 4}}"))),
    };
    if set.is_empty() {
        return Err(Error::InvalidInput("empty prime set".into()));
    }
    let p4 = set.fourth_powers()?;
    let max = *p4.last().unwrap();
    if (m as i128).checked_mul(max).is_none_or(|v| v > i128::MAX / 4) {
        return Err(Error::Overflow("m * max p^4"));
    }
    let r = sum_spectrum(&p4, m)?;
    let diff = convolve(&r, &r, -1)?;
    Ok(SpectrumMap {
        order,
        entries: diff.into_iter().collect(),
    })
}

fn membership(set: &PrimeSet) -> HashSet<i128> {
    set.primes.iter().map(|&p| p as i128).collect()
}

/// c_j: pairs `(p, k)` with `p, p+k` in P and `(p+k)^4 - p^4 = j`.
pub fn spectrum_c(set: &PrimeSet) -> Result<SpectrumMap> {
    let ps: Vec<i128> = set.primes.iter().map(|&p| p as i128).collect();
    let keys: Vec<i128> = ps
        .iter()
        .flat_map(|&p| ps.iter().map(move |&q| q - p).map(move |k| k * (4 * p * p * p + 6 * p * p * k + 4 * p * k * k + k * k * k)))
        .collect();
    Ok(SpectrumMap::from_keys(SpectrumOrder::C, keys))
}

/// c*_j: triples `(p, k1, k2)` with `p, p+k1, p+k2, p+k1+k2` in P.
pub fn spectrum_c_star(set: &PrimeSet) -> Result<SpectrumMap> {
    let ps: Vec<i128> = set.primes.iter().map(|&p| p as i128).collect();
    let member = membership(set);
    let keys: Vec<i128> = ps
        .par_iter()
        .flat_map_iter(|&p| {
            let mut local = Vec::new();
            for &q1 in &ps {
                let k1 = q1 - p;
                for &q2 in &ps {
                    let k2 = q2 - p;
                    if member.contains(&(p + k1 + k2)) {
                        local.push(
                            2 * k1 * k2 * (6 * p * p + 6 * p * k1 + 6 * p * k2 + 2 * k1 * k1 + 3 * k1 * k2 + 2 * k2 * k2),
                        );
                    }
                }
            }
            local
        })
        .collect();
    Ok(SpectrumMap::from_keys(SpectrumOrder::CStar, keys))
}

/// c-bar_j: quadruples `(p, k1, k2, k3)` whose eight shifted points
/// `p + (any subset sum of k1, k2, k3)` all lie in P.
pub fn spectrum_c_bar(set: &PrimeSet) -> Result<SpectrumMap> {
    if set.len() > MAX_C_BAR_SIZE {
        return Err(Error::SizeLimit(format!(
            "third-difference spectrum needs |P| <= {MAX_C_BAR_SIZE}, got {}",
            set.len()
        )));
    }
    let ps: Vec<i128> = set.primes.iter().map(|&p| p as i128).collect();
    let member = membership(set);
    let keys: Vec<i128> = ps
        .par_iter()
        .flat_map_iter(|&p| {
            let mut local = Vec::new();
            for &q1 in &ps {
                let k1 = q1 - p;
                for &q2 in &ps {
                    let k2 = q2 - p;
                    if !member.contains(&(p + k1 + k2)) {
                        continue;
                    }
                    for &q3 in &ps {
                        let k3 = q3 - p;
                        if member.contains(&(p + k1 + k3))
                            && member.contains(&(p + k2 + k3))
                            && member.contains(&(p + k1 + k2 + k3))
                        {
                            local.push(12 * k1 * k2 * k3 * (2 * p + k1 + k2 + k3));
                        }
                    }
                }
            }
            local
        })
        .collect();
    Ok(SpectrumMap::from_keys(SpectrumOrder::CBar, keys))
}

/// `integral_0^1 |S(t)|^(2m) dt = sum_s r_m(s)^2`, exactly.
pub fn exact_moment(set: &PrimeSet, m: u32) -> Result<u128> {
    if m == 8 && set.len() > MAX_M8_SIZE {
        return Err(Error::SizeLimit(format!(
            "sixteenth moment needs |P| <= {MAX_M8_SIZE}, got {}",
            set.len()
        )));
    }
    if set.is_empty() {
        return Ok(0);
    }
    let r = sum_spectrum(&set.fourth_powers()?, m)?;
    r.iter().try_fold(0u128, |acc, &(_, c)| {
        (c as u128).checked_mul(c as u128).and_then(|sq| acc.checked_add(sq)).ok_or(Error::Overflow("moment"))
    })
}

/// `b_0 c_0 + sum_{j != 0} b_j c_j` for the fourth moment.
pub fn fourth_moment_via_spectra(set: &PrimeSet) -> Result<u128> {
    let b = spectrum_b(set, 1)?;
    let c = spectrum_c(set)?;
    Ok(b.pair_with(&c))
}

/// The two Cauchy-step inequalities: `(lhs, rhs)` for
/// `integral |S|^8 <= |P| sum b*_j c*_j` and, when `with_sixteenth`,
/// `integral |S|^16 <= |P|^4 sum b-bar_j c-bar_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CauchyCheck {
    pub eighth: (u128, u128),
    pub sixteenth: Option<(u128, u128)>,
}

pub fn cauchy_inequalities(set: &PrimeSet, with_sixteenth: bool) -> Result<CauchyCheck> {
    let n = set.len() as u128;
    let eighth = (
        exact_moment(set, 4)?,
        n * spectrum_b(set, 2)?.pair_with(&spectrum_c_star(set)?),
    );
    let sixteenth = if with_sixteenth {
        Some((
            exact_moment(set, 8)?,
            n.pow(4) * spectrum_b(set, 4)?.pair_with(&spectrum_c_bar(set)?),
        ))
    } else {
        None
    };
    Ok(CauchyCheck { eighth, sixteenth })
}

/// Sample count used by [`quadrature_moment`] by default: one more than the
/// largest frequency `m (max(p)^4 - min(p)^4)` of `|S|^(2m)`.
pub fn default_samples(set: &PrimeSet, m: u32) -> u64 {
    let max = set.primes.last().copied().unwrap_or(1);
    let min = set.primes.first().copied().unwrap_or(1);
    m as u64 * (max.pow(4) - min.pow(4)) + 1
}

/// `(1/M) sum_{i<M} |S(i/M)|^(2m)`: exact for the trigonometric polynomial
/// `|S|^(2m)` once M exceeds its largest frequency, so it is an independent
/// floating-point check of [`exact_moment`]. Phases are seeded from exact
/// integer residues `i p^4 mod M` every 4096 samples and rotated in between;
/// the symmetry `|S(-t)| = |S(t)|` halves the work.
pub fn quadrature_moment(set: &PrimeSet, m: u32, samples: Option<u64>) -> Result<f64> {
    if set.is_empty() {
        return Ok(0.0);
    }
    let big_m = samples.unwrap_or_else(|| default_samples(set, m));
    let work = (big_m / 2) as u128 * set.len() as u128;
    if work > MAX_QUADRATURE_WORK as u128 || big_m < 1 {
        return Err(Error::SizeLimit(format!("{big_m} samples over {} primes", set.len())));
    }
    let freqs: Vec<u64> = set.primes.iter().map(|&p| p.pow(4) % big_m).collect();
    let turn = |r: u64| -> Complex64 {
        let (s, c) = (std::f64::consts::TAU * (r as f64 / big_m as f64)).sin_cos();
        Complex64::new(c, s)
    };
    let steps: Vec<Complex64> = freqs.iter().map(|&f| turn(f)).collect();
    let power = |z: Complex64| z.norm_sqr().powi(m as i32);
    // i = 0 once, then 1..=half twice, plus the middle point when M is even
    let half = (big_m - 1) / 2;
    const CHUNK: u64 = 4096;
    let chunks = half.div_ceil(CHUNK);
    let parts: Vec<f64> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = 1 + c * CHUNK;
            let end = (start + CHUNK).min(half + 1);
            let mut cur: Vec<Complex64> = freqs
                .iter()
                .map(|&f| turn(((start as u128 * f as u128) % big_m as u128) as u64))
                .collect();
            let mut vals = Vec::with_capacity((end - start) as usize);
            for _ in start..end {
                vals.push(power(pairwise_sum(&cur)));
                for (z, s) in cur.iter_mut().zip(&steps) {
                    *z *= *s;
                }
            }
            pairwise_sum(&vals)
        })
        .collect();
    let mut total = power(Complex64::new(set.len() as f64, 0.0)) + 2.0 * par_pairwise_sum(&parts);
    if big_m.is_multiple_of(2) {
        let mid: Vec<Complex64> = freqs.iter().map(|&f| turn(((big_m / 2) as u128 * f as u128 % big_m as u128) as u64)).collect();
        total += power(pairwise_sum(&mid));
    }
    Ok(total / big_m as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub size: usize,
    pub max_prime: u64,
    pub moment: u128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub m: u32,
    pub rows: Vec<ScalingRow>,
    /// Least-squares slope of `ln moment` against `ln |P|`.
    pub slope: f64,
}

/// Moments of order 2m over the first `n` PS primes for each `n` in `sizes`,
/// with the fitted log-log slope.
pub fn scaling_report(gamma: &GammaType, sizes: &[usize], m: u32) -> Result<ScalingReport> {
    let largest = sizes.iter().copied().max().unwrap_or(0);
    let all = PrimeSet::first(largest, gamma)?;
    let mut rows = Vec::new();
    for &n in sizes {
        let set = PrimeSet::new(all.primes[..n].to_vec());
        rows.push(ScalingRow {
            size: n,
            max_prime: set.primes.last().copied().unwrap_or(0),
            moment: exact_moment(&set, m)?,
        });
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| ((r.size as f64).ln(), (r.moment as f64).ln())).collect();
    Ok(ScalingReport {
        m,
        slope: ls_slope(&pts),
        rows,
    })
}

fn ls_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::divisor_tau;

    fn small() -> PrimeSet {
        PrimeSet::new(vec![2, 3, 5])
    }

    fn g9() -> GammaType {
        GammaType::new(0.9).unwrap()
    }

    #[test]
    fn b_examples() {
        let b = spectrum_b(&small(), 1).unwrap();
        assert_eq!(b.get(0), 3);
        assert_eq!(b.get(65), 1);
        assert_eq!(b.get(-65), 1);
        assert_eq!(b.len(), 7);
        assert_eq!(b.total(), 9);
        let one = PrimeSet::new(vec![7]);
        for m in [1, 2, 4] {
            let s = spectrum_b(&one, m).unwrap();
            assert_eq!(s.entries, BTreeMap::from([(0, 1)]));
        }
    }

    #[test]
    fn c_examples() {
        let c = spectrum_c(&small()).unwrap();
        assert_eq!(c.get(65), 1);
        assert_eq!(c.get(0), 3);
        let one = PrimeSet::new(vec![7]);
        assert_eq!(spectrum_c_star(&one).unwrap().entries, BTreeMap::from([(0, 1)]));
        assert_eq!(spectrum_c_bar(&one).unwrap().entries, BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn moment_examples() {
        assert_eq!(exact_moment(&small(), 1).unwrap(), 3);
        assert_eq!(exact_moment(&small(), 2).unwrap(), 15);
        assert_eq!(fourth_moment_via_spectra(&small()).unwrap(), 15);
        let q = quadrature_moment(&small(), 2, Some(5001)).unwrap();
        assert!((q - 15.0).abs() < 1e-9, "{q}");
        assert_eq!(quadrature_moment(&PrimeSet::new(vec![]), 2, None).unwrap(), 0.0);
        assert_eq!(exact_moment(&PrimeSet::new(vec![]), 2).unwrap(), 0);
    }

    #[test]
    fn mass_identities_and_diagonals() {
        for n in [1, 2, 5, 9, 12] {
            let set = PrimeSet::first(n, &g9()).unwrap();
            let size = n as u128;
            let b = spectrum_b(&set, 1).unwrap();
            let bs = spectrum_b(&set, 2).unwrap();
            let bb = spectrum_b(&set, 4).unwrap();
            assert_eq!(b.total(), size.pow(2));
            assert_eq!(bs.total(), size.pow(4));
            assert_eq!(bb.total(), size.pow(8));
            assert_eq!(b.get(0) as u128, size);
            assert_eq!(bs.get(0) as u128, exact_moment(&set, 2).unwrap());
            assert_eq!(bb.get(0) as u128, exact_moment(&set, 4).unwrap());
            for s in [&b, &bs, &bb] {
                for (j, c) in &s.entries {
                    assert_eq!(s.get(-j), *c);
                }
            }
            for m in [1, 2, 4, 8] {
                assert!(exact_moment(&set, m).unwrap() >= size.pow(m));
            }
        }
    }

    #[test]
    fn c_strata() {
        for n in [3, 8, 15] {
            let set = PrimeSet::first(n, &g9()).unwrap();
            let size = n as u64;
            assert_eq!(spectrum_c(&set).unwrap().get(0), size);
            let cs = spectrum_c_star(&set).unwrap().get(0);
            assert!(cs >= size && cs <= 2 * size * size - size, "{cs}");
            let cb = spectrum_c_bar(&set).unwrap().get(0);
            assert!(cb <= 7 * size.pow(3));
        }
    }

    #[test]
    fn divisor_caps() {
        let set = PrimeSet::first(20, &g9()).unwrap();
        let check = |s: &SpectrumMap, k: u32| {
            for (&j, &c) in &s.entries {
                if j != 0 {
                    assert!(c as u128 <= divisor_tau(j, k).unwrap(), "{:?} j={j} c={c}", s.order);
                }
            }
        };
        check(&spectrum_c(&set).unwrap(), 2);
        check(&spectrum_c_star(&set).unwrap(), 4);
        check(&spectrum_c_bar(&PrimeSet::new(set.primes[..10].to_vec())).unwrap(), 5);
    }

    #[test]
    fn c_equals_b_first_order() {
        let set = PrimeSet::first(30, &g9()).unwrap();
        assert_eq!(spectrum_c(&set).unwrap().entries, spectrum_b(&set, 1).unwrap().entries);
    }

    #[test]
    fn quadrature_oracle() {
        for n in [1, 4, 8] {
            let set = PrimeSet::first(n, &g9()).unwrap();
            for m in [1, 2] {
                let exact = exact_moment(&set, m).unwrap() as f64;
                let q = quadrature_moment(&set, m, None).unwrap();
                assert!(((q - exact) / exact).abs() < 1e-6, "n={n} m={m} {q} {exact}");
            }
        }
    }

    #[test]
    fn cauchy_steps() {
        for n in 1..=12 {
            let set = PrimeSet::first(n, &g9()).unwrap();
            let c = cauchy_inequalities(&set, false).unwrap();
            assert!(c.eighth.0 <= c.eighth.1, "n={n} {:?}", c.eighth);
        }
        // With the factor |P|^4 the sixteenth-moment step already fails at
        // t = 0 for P = {2, 3}: |S(0)|^8 = 256 while |P|^4 * sum c-bar = 16 * 8.
        let set = PrimeSet::new(vec![2, 3]);
        assert_eq!(spectrum_c_bar(&set).unwrap().total(), 8);
        let (l, r) = cauchy_inequalities(&set, true).unwrap().sixteenth.unwrap();
        assert_eq!((l, r), (12870, 8960));
    }

    #[test]
    fn size_limits() {
        let set = PrimeSet::first(61, &g9()).unwrap();
        assert!(matches!(spectrum_c_bar(&set), Err(Error::SizeLimit(_))));
        let set = PrimeSet::first(13, &g9()).unwrap();
        assert!(matches!(exact_moment(&set, 8), Err(Error::SizeLimit(_))));
    }

    #[test]
    fn slope_of_pure_power() {
        let pts: Vec<(f64, f64)> = (1..6).map(|i| ((i as f64).ln(), 3.0 * (i as f64).ln() + 1.0)).collect();
        assert!((ls_slope(&pts) - 3.0).abs() < 1e-12);
    }
}
