//! The acceptance checks behind `ps-trident verify`.
//!
//! Each check recomputes its quantities from the library and compares them
//! with an independent route (a second enumeration, brute force, quadrature or
//! frozen high-precision values). The rendered report contains no timings, so
//! it is byte-identical across runs and thread counts.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expsums::{decompose_s4, ExpSum, ExpSumSpec};
use crate::gamma::{build_tables, derive_params, find_triples, gamma_direct, gamma_via_integral, main_term_b, params_for_x};
use crate::gamma::{ProblemSpec, TripleSolution, DEFAULT_QUAD_BUDGET};
use crate::moments::{
    exact_moment, fourth_moment_via_spectra, quadrature_moment, scaling_report, spectrum_b, spectrum_c, spectrum_c_bar,
    spectrum_c_star, PrimeSet,
};
use crate::numeric::quad::gauss_legendre;
use crate::numeric::{divisor_tau, guarded_floor, GuardedReal, HighPrecisionReal};
use crate::primes::{density_report, exact_floor_root_power, ps_primes_upto, GammaType, GUARD_FLOOR};
use crate::smoothing::SmoothingKernel;

/// Number of acceptance criteria.
pub const CRITERIA: u32 = 12;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    /// Stated wall-clock allowance, if any.
    pub limit_seconds: Option<f64>,
    #[serde(skip)]
    pub seconds: f64,
}

pub fn title(id: u32) -> &'static str {
    match id {
        1 => "PS primes: prime-side table equals n-side enumeration",
        2 => "PS prime density trend",
        3 => "smoothing kernel contract",
        4 => "exact S_4 decomposition",
        5 => "moment identities",
        6 => "divisor caps on c-type spectra",
        7 => "moment scaling",
        8 => "parameter schedule",
        9 => "triple solver against brute force",
        10 => "Fourier decomposition of Gamma",
        11 => "main-term positivity and stability",
        12 => "determinism across runs and thread counts",
        _ => "unknown",
    }
}

pub fn limit_seconds(id: u32) -> Option<f64> {
    match id {
        1 | 9 => Some(60.0),
        2 | 6 | 10 => Some(300.0),
        3 | 4 => Some(30.0),
        5 | 11 => Some(120.0),
        7 => Some(600.0),
        _ => None,
    }
}

/// 17 significant digits.
pub fn f17(v: f64) -> String {
    format!("{v:.16e}")
}

fn g(v: f64) -> GammaType {
    GammaType::new(v).expect("valid gamma")
}

fn hp(s: &str) -> HighPrecisionReal {
    HighPrecisionReal::parse(s).expect("valid literal")
}

/// Plain sieve of Eratosthenes, kept separate from the segmented one.
fn simple_sieve(n: usize) -> Vec<bool> {
    let mut is = vec![true; n + 1];
    is[0] = false;
    if n >= 1 {
        is[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if is[i] {
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is
}

/// `floor(n^(1/gamma))`, certified: double precision with a guard band,
/// exact integer comparison `p^a <= n^b` for `gamma = a/b` inside the band.
fn floor_inverse_power(n: u64, gamma: &GammaType) -> Result<u64> {
    let v = (n as f64).powf(1.0 / gamma.value());
    let guard = (v * f64::EPSILON * (8.0 + 2.0 * v.max(1.0).ln())).max(GUARD_FLOOR);
    match guarded_floor(GuardedReal::new(v, guard)) {
        Ok(f) => Ok(f as u64),
        Err(e) => match gamma.exact() {
            Some((a, b)) => exact_floor_root_power(n, a, b, v),
            None => Err(e),
        },
    }
}

/// PS primes up to X from the n side: `{floor(n^(1/gamma)) : n <= ceil(X^gamma) + 1}`
/// intersected with the primes.
pub fn n_side_ps_primes(x: u64, gamma: &GammaType) -> Result<Vec<u64>> {
    let sieve = simple_sieve(x as usize);
    let nmax = (x as f64).powf(gamma.value()).ceil() as u64 + 1;
    let mut out = BTreeSet::new();
    for n in 1..=nmax {
        let p = floor_inverse_power(n, gamma)?;
        if p <= x && sieve[p as usize] {
            out.insert(p);
        }
    }
    Ok(out.into_iter().collect())
}

fn c1() -> Result<(bool, String)> {
    let mut pass = true;
    let mut d = String::new();
    for gv in [0.8, 0.9, 0.95, 0.9955] {
        let gamma = g(gv);
        let p_side = ps_primes_upto(1_000_000, &gamma)?;
        let n_side = n_side_ps_primes(1_000_000, &gamma)?;
        let eq = p_side == n_side;
        pass &= eq;
        let _ = write!(d, "gamma={gv}: p-side {} n-side {} equal={eq}; ", p_side.len(), n_side.len());
    }
    Ok((pass, d))
}

fn c2() -> Result<(bool, String)> {
    let mut pass = true;
    let mut d = String::new();
    for gv in [0.9, 0.95] {
        let rows = density_report(&[1e5, 1e6, 1e7], g(gv))?;
        let dev: Vec<f64> = rows.iter().map(|r| (r.ratio - 1.0).abs()).collect();
        let ok = dev.windows(2).all(|w| w[1] <= w[0]) && dev[2] < 0.25;
        pass &= ok;
        let _ = write!(d, "gamma={gv}: ratios");
        for r in &rows {
            let _ = write!(d, " {}", f17(r.ratio));
        }
        let _ = write!(d, " ok={ok}; ");
    }
    Ok((pass, d))
}

/// Direct quadrature of `integral theta(y) cos(2 pi x y) dy`, split at every knot.
pub fn fourier_by_quadrature(kn: &SmoothingKernel, x: f64) -> f64 {
    let mut pts: Vec<f64> = kn.knots().iter().flat_map(|&p| [p, -p]).collect();
    pts.push(0.0);
    pts.sort_by(f64::total_cmp);
    let (nodes, weights) = gauss_legendre(20);
    let mut total = 0.0;
    for seg in pts.windows(2) {
        let (lo, hi) = (seg[0], seg[1]);
        let panels = (((hi - lo) * (x.abs() + 1.0) * 4.0).ceil() as usize).max(1);
        let h = (hi - lo) / panels as f64;
        for p in 0..panels {
            let a = lo + p as f64 * h;
            for (xj, wj) in nodes.iter().zip(&weights) {
                let y = a + 0.5 * h * (1.0 + xj);
                total += 0.5 * h * wj * kn.theta(y) * (std::f64::consts::TAU * x * y).cos();
            }
        }
    }
    total
}

fn c3() -> Result<(bool, String)> {
    let mut regime_ok = true;
    let mut bound_ok = true;
    let mut worst_recon: f64 = 0.0;
    for k in 1..=6 {
        for eps in [0.37, 1.0] {
            let kn = SmoothingKernel::new(eps, k)?;
            for i in 0..1000 {
                let y = -1.25 * eps + 2.5 * eps * i as f64 / 999.0;
                let v = kn.theta(y);
                regime_ok &= if y.abs() <= 0.75 * eps {
                    v == 1.0
                } else if y.abs() >= eps {
                    v == 0.0
                } else {
                    v > 0.0 && v < 1.0
                };
            }
            for i in 0..10_000 {
                let x = 10f64.powf(-4.0 + 10.0 * i as f64 / 9_999.0);
                bound_ok &= kn.theta_fourier(x).abs() <= kn.fourier_bound(x) * (1.0 + 1e-12);
            }
        }
        let kn = SmoothingKernel::new(0.8, k)?;
        for i in 0..100 {
            let x = -50.0 / kn.eps + i as f64 * (100.0 / kn.eps) / 99.0;
            worst_recon = worst_recon.max((fourier_by_quadrature(&kn, x) - kn.theta_fourier(x)).abs());
        }
    }
    let pass = regime_ok && bound_ok && worst_recon <= 1e-8;
    Ok((
        pass,
        format!("regimes exact={regime_ok}; bound holds={bound_ok}; max transform error={}", f17(worst_recon)),
    ))
}

/// Deterministic points spread over `[-1, 1)` (golden-ratio sequence).
pub fn spread_points(n: usize) -> Vec<f64> {
    let phi = 0.618_033_988_749_894_9_f64;
    (1..=n).map(|i| 2.0 * (0.5 + i as f64 * phi).fract() - 1.0).collect()
}

fn c4() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for t in spread_points(100) {
        let d = decompose_s4(t, 1e4, 1e-3, g(0.95))?;
        worst = worst.max(d.residual.norm() / d.weight_mass);
    }
    Ok((worst <= 1e-9, format!("max |residual| / weight mass = {}", f17(worst))))
}

fn c5() -> Result<(bool, String)> {
    let gamma = g(0.9);
    let all = PrimeSet::first(20, &gamma)?;
    let mut pass = true;
    let mut worst_q: f64 = 0.0;
    for n in [1usize, 2, 3, 5, 8, 12, 16, 20] {
        let set = PrimeSet::new(all.primes[..n].to_vec());
        let size = n as u128;
        let m1 = exact_moment(&set, 1)?;
        let b = spectrum_b(&set, 1)?;
        let m2 = exact_moment(&set, 2)?;
        let via = fourth_moment_via_spectra(&set)?;
        pass &= m1 == size && b.total() == size * size && via == m2;
        for (m, exact) in [(1, m1), (2, m2)] {
            let q = quadrature_moment(&set, m, None)?;
            worst_q = worst_q.max(((q - exact as f64) / exact as f64).abs());
        }
    }
    pass &= worst_q <= 1e-6;
    Ok((
        pass,
        format!("|P| in {{1,2,3,5,8,12,16,20}}: integer identities hold={pass}; max quadrature rel. error={}", f17(worst_q)),
    ))
}

fn c6() -> Result<(bool, String)> {
    let set = PrimeSet::first(40, &g(0.9))?;
    let small = PrimeSet::new(set.primes[..12].to_vec());
    let mut checked = 0usize;
    let mut violations = 0usize;
    for (spec, k) in [(spectrum_c(&set)?, 2), (spectrum_c_star(&set)?, 4), (spectrum_c_bar(&small)?, 5)] {
        for (&j, &c) in &spec.entries {
            if j != 0 {
                checked += 1;
                if c as u128 > divisor_tau(j, k)? {
                    violations += 1;
                }
            }
        }
    }
    Ok((violations == 0, format!("{checked} off-diagonal keys checked, {violations} above their divisor cap")))
}

fn c7() -> Result<(bool, String)> {
    let gamma = g(0.9);
    let r2 = scaling_report(&gamma, &[50, 100, 200, 400], 2)?;
    let r4 = scaling_report(&gamma, &[10, 20, 30, 40, 50, 60], 4)?;
    let ok2 = r2.slope > 2.0 && r2.slope < 2.35;
    let ok4 = r4.slope > 5.0 && r4.slope < 5.5;
    let all = PrimeSet::first(12, &gamma)?;
    let mut ok16 = true;
    for n in 1..=12 {
        let set = PrimeSet::new(all.primes[..n].to_vec());
        ok16 &= exact_moment(&set, 8)? >= (n as u128).pow(8);
    }
    let m4: Vec<String> = r4.rows.iter().map(|r| r.moment.to_string()).collect();
    Ok((
        ok2 && ok4 && ok16,
        format!(
            "slope m=2 {} in (2.0,2.35)={ok2}; slope m=4 {} in (5.0,5.5)={ok4} (moments {}); 16th moment >= |P|^8 for |P|<=12: {ok16}",
            f17(r2.slope),
            f17(r4.slope),
            m4.join(",")
        ),
    ))
}

/// `(gamma, theta, Delta, eps, H)` at q0 = 64, from 50-digit arithmetic.
const SCHEDULE_REFERENCE: [(&str, &str, f64, f64, f64); 3] = [
    ("0.97", "0.05", 0.002_199_930_016_425_607_5, 2.0, 40.598_279_676_088_02),
    ("0.99", "0.01", 0.002_199_930_016_425_607_5, 1.152_686_346_798_864_2, 70.441_156_501_651_76),
    ("0.9955", "0.001", 0.002_199_930_016_425_607_5, 1.008_614_590_209_481, 80.503_058_492_651_97),
];

fn c8() -> Result<(bool, String)> {
    let mut pass = true;
    let mut worst: f64 = 0.0;
    for (gs, ts, delta, eps, h) in SCHEDULE_REFERENCE {
        let gamma = crate::config::parse_gamma(gs)?;
        let spec = ProblemSpec::new(hp("sqrt:2"), hp("1"), -1.0, 0.0, gamma, crate::config::parse_real(ts)?, 0.05)?;
        let p = derive_params(64, &spec)?;
        pass &= p.x == 8192.0 && p.smoothing_k == 9;
        for (got, want) in [(p.delta, delta), (p.eps, eps), (p.h, h)] {
            worst = worst.max(((got - want) / want).abs());
        }
    }
    pass &= worst <= 1e-12;
    Ok((pass, format!("X=8192 exactly, k=9: {pass}; max relative deviation {}", f17(worst))))
}

/// All triples in range with `|value| < tol`, by three nested loops.
pub fn brute_force_triples(spec: &ProblemSpec, x: f64, tol: f64) -> Result<Vec<TripleSolution>> {
    let t = build_tables(spec, x)?;
    let mut out = Vec::new();
    for &p1 in &t.t1.primes {
        for &p2 in &t.t2.primes {
            for &p3 in &t.t4.primes {
                let value = spec.l1() * p1 as f64 + spec.l2() * p2 as f64 + spec.lambda3 * (p3 as f64).powi(4) + spec.eta;
                if value.abs() < tol {
                    out.push(TripleSolution { p1, p2, p3, value });
                }
            }
        }
    }
    Ok(out)
}

fn c9() -> Result<(bool, String)> {
    let spec = ProblemSpec::new(hp("1"), hp("1"), -2.0, 0.0, g(0.9), 0.05, 1e-4)?;
    let fast = find_triples(&spec, 1e4, 0.5, None)?;
    let brute = brute_force_triples(&spec, 1e4, 0.5)?;
    let found = fast.iter().any(|s| (s.p1, s.p2, s.p3) == (3, 29, 2));
    let eq = fast == brute;
    Ok((eq && found, format!("{} solutions, equal to brute force={eq}, contains (3,29,2)={found}", fast.len())))
}

/// The Fourier-decomposition instance: X = 2000, gamma = 0.97, lambda = (sqrt 2, 1, -1), eta = 0.3.
pub fn decomposition_instance() -> ProblemSpec {
    ProblemSpec::new(hp("sqrt:2"), hp("1"), -1.0, 0.3, g(0.97), 0.05, 0.1).expect("valid instance")
}

fn c10() -> Result<(bool, String)> {
    let spec = decomposition_instance();
    let params = params_for_x(2000.0, &spec)?;
    let direct = gamma_direct(&spec, &params)?;
    let int = gamma_via_integral(&spec, &params, DEFAULT_QUAD_BUDGET)?;
    let gap = (direct.value - int.total).abs();
    let contains = gap <= int.gamma3_bound + 0.1 * direct.value.abs();
    let imag = int.imag_diagnostic <= 1e-3 * int.total.abs();
    let tail = int.gamma3_bound <= 1.0;
    Ok((
        contains && imag && tail,
        format!(
            "direct {} integral {} +- {} ({} triples in support, {} evaluations); contains={contains}; |Im|={} ok={imag}; tail bound <= 1: {tail}",
            f17(direct.value),
            f17(int.total),
            f17(int.gamma3_bound),
            direct.support,
            int.evaluations,
            f17(int.imag_diagnostic)
        ),
    ))
}

/// The main-term instance: the decomposition instance with admissible lambda0 = 0.05.
pub fn main_term_instance() -> ProblemSpec {
    ProblemSpec::new(hp("sqrt:2"), hp("1"), -1.0, 0.3, g(0.97), 0.05, 0.05).expect("valid instance")
}

fn c11() -> Result<(bool, String)> {
    let spec = main_term_instance();
    let mut ratios = Vec::new();
    for x in [1e3, 1e4, 1e5] {
        ratios.push(main_term_b(&spec, &params_for_x(x, &spec)?, false)?.ratio);
    }
    let positive = ratios.iter().all(|&r| r > 0.0);
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &r| (l.min(r), h.max(r)));
    let stable = positive && hi / lo <= 3.0;
    let shown: Vec<String> = ratios.iter().map(|&r| f17(r)).collect();
    Ok((positive && stable, format!("B/(eps X^1.25) = {}; positive={positive}; within factor 3={stable}", shown.join(", "))))
}

/// Outputs of representative parallel computations, rendered to text.
pub fn determinism_fingerprint() -> Result<String> {
    let mut out = String::new();
    let s = ExpSum::build(&ExpSumSpec::s(1, 2e5, 0.1, g(0.95)))?;
    for v in s.sweep(0.0123, 1e-6, 3000).iter().step_by(97) {
        let _ = write!(out, "{} {} ", f17(v.re), f17(v.im));
    }
    let set = PrimeSet::first(10, &g(0.9))?;
    let _ = write!(out, "{} ", f17(quadrature_moment(&set, 2, None)?));
    let _ = write!(out, "{} ", exact_moment(&set, 4)?);
    let spec = decomposition_instance();
    let params = params_for_x(1500.0, &spec)?;
    let int = gamma_via_integral(&spec, &params, DEFAULT_QUAD_BUDGET)?;
    let _ = write!(out, "{} {} {}", f17(int.gamma1.re), f17(int.gamma2.re), f17(int.total));
    Ok(out)
}

/// Run `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Invariant(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn c12() -> Result<(bool, String)> {
    let a = with_threads(1, determinism_fingerprint)??;
    let b = with_threads(8, determinism_fingerprint)??;
    let c = with_threads(8, determinism_fingerprint)??;
    let same = a == b && b == c;
    Ok((same, format!("fingerprints at 1, 8, 8 threads identical={same} ({} bytes)", a.len())))
}

pub fn run_criterion(id: u32) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => c1(),
        2 => c2(),
        3 => c3(),
        4 => c4(),
        5 => c5(),
        6 => c6(),
        7 => c7(),
        8 => c8(),
        9 => c9(),
        10 => c10(),
        11 => c11(),
        12 => c12(),
        _ => Err(Error::InvalidInput(format!("no criterion {id}"))),
    };
    let (pass, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult {
        id,
        title: title(id),
        pass,
        detail,
        limit_seconds: limit_seconds(id),
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=CRITERIA).map(run_criterion).collect()
}

/// The pass/fail table, without timings.
pub fn render(results: &[CriterionResult]) -> String {
    let mut out = String::new();
    for r in results {
        let _ = writeln!(out, "{:>2} {} {}: {}", r.id, if r.pass { "PASS" } else { "FAIL" }, r.title, r.detail);
    }
    let passed = results.iter().filter(|r| r.pass).count();
    let _ = writeln!(out, "{passed}/{} passed", results.len());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_side_matches_p_side_small() {
        for gv in [0.5, 0.75, 0.9, 0.99] {
            let gamma = g(gv);
            assert_eq!(n_side_ps_primes(20_000, &gamma).unwrap(), ps_primes_upto(20_000, &gamma).unwrap());
        }
    }

    #[test]
    fn simple_sieve_counts() {
        assert_eq!(simple_sieve(10_000).iter().filter(|&&b| b).count(), 1229);
    }

    #[test]
    fn spread_points_in_range() {
        let pts = spread_points(1000);
        assert!(pts.iter().all(|t| (-1.0..1.0).contains(t)));
    }
}
