use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// A continued-fraction convergent `a/q` with `q > 0` and `gcd(|a|, q) = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Convergent {
    #[serde(serialize_with = "ser_bigint")]
    pub a: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub q: BigInt,
}

fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl Convergent {
    pub fn new(a: i64, q: i64) -> Self {
        Convergent {
            a: BigInt::from(a),
            q: BigInt::from(q),
        }
    }

    pub fn q_u64(&self) -> Option<u64> {
        self.q.to_u64()
    }

    pub fn as_ratio(&self) -> BigRational {
        BigRational::new(self.a.clone(), self.q.clone())
    }
}

impl fmt::Display for Convergent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.a, self.q)
    }
}

/// A real number known to arbitrary precision.
///
/// Accepted textual forms:
/// * `7/3`, `-2`, `0.3`, `1e-4`: exact rationals;
/// * `1.41421356237...`: a decimal approximation, trusted to one unit in the
///   last written digit;
/// * `sqrt:D` or `-sqrt:D`: the square root of a positive integer;
/// * `surd:a,b,d,c`: the quadratic surd `(a + b*sqrt(d)) / c`.
#[derive(Debug, Clone, PartialEq)]
pub enum HighPrecisionReal {
    Rational(BigRational),
    Approx { lo: BigRational, hi: BigRational },
    Surd { a: BigInt, b: BigInt, d: BigInt, c: BigInt },
}

fn pow10(e: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), e as usize)
}

fn parse_decimal(s: &str) -> Result<(BigRational, u32)> {
    let bad = || Error::InvalidInput(format!("cannot parse number '{s}'"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits: BigInt = format!("0{int_part}{frac_part}").parse().map_err(|_| bad())?;
    let scale = frac_part.len() as i32 - exp;
    let mut value = if scale >= 0 {
        BigRational::new(digits, pow10(scale as u32))
    } else {
        BigRational::from_integer(digits * pow10((-scale) as u32))
    };
    if neg {
        value = -value;
    }
    Ok((value, scale.max(0) as u32))
}

impl HighPrecisionReal {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidInput(format!("cannot parse number '{s}'"));
        if let Some(rest) = s.strip_prefix("surd:") {
            let parts: Vec<BigInt> = rest
                .split(',')
                .map(|p| p.trim().parse::<BigInt>().map_err(|_| bad()))
                .collect::<Result<_>>()?;
            if parts.len() != 4 {
                return Err(bad());
            }
            return Self::surd(parts[0].clone(), parts[1].clone(), parts[2].clone(), parts[3].clone());
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(r) => (true, r),
            None => (false, s),
        };
        if let Some(d) = body.strip_prefix("sqrt:") {
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            let b = if neg { -BigInt::one() } else { BigInt::one() };
            return Self::surd(BigInt::zero(), b, d, BigInt::one());
        }
        if let Some(digits) = s.strip_suffix("...") {
            let (mid, scale) = parse_decimal(digits)?;
            let ulp = BigRational::new(BigInt::one(), pow10(scale));
            return Ok(HighPrecisionReal::Approx {
                lo: &mid - &ulp,
                hi: &mid + &ulp,
            });
        }
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(HighPrecisionReal::Rational(BigRational::new(n, d)));
        }
        Ok(HighPrecisionReal::Rational(parse_decimal(s)?.0))
    }

    /// `(a + b*sqrt(d)) / c`; collapses to a rational when `d` is a square.
    pub fn surd(a: BigInt, b: BigInt, d: BigInt, c: BigInt) -> Result<Self> {
        if c.is_zero() || d.is_negative() {
            return Err(Error::InvalidInput("surd needs c != 0 and d >= 0".into()));
        }
        let r = d.sqrt();
        if &r * &r == d || b.is_zero() {
            return Ok(HighPrecisionReal::Rational(BigRational::new(a + b * r, c)));
        }
        Ok(HighPrecisionReal::Surd { a, b, d, c })
    }

    pub fn from_f64_exact(v: f64) -> Option<Self> {
        BigRational::from_float(v).map(HighPrecisionReal::Rational)
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, HighPrecisionReal::Rational(_))
    }

    /// Closed rational interval containing the value, at least `digits`
    /// decimal digits wide for surds.
    pub fn enclosure(&self, digits: u32) -> (BigRational, BigRational) {
        match self {
            HighPrecisionReal::Rational(r) => (r.clone(), r.clone()),
            HighPrecisionReal::Approx { lo, hi } => (lo.clone(), hi.clone()),
            HighPrecisionReal::Surd { a, b, d, c } => {
                let scale = pow10(digits);
                let s = (d * &scale * &scale).sqrt();
                let root_lo = BigRational::new(s.clone(), scale.clone());
                let root_hi = BigRational::new(s + 1, scale);
                let a = BigRational::from_integer(a.clone());
                let b = BigRational::from_integer(b.clone());
                let c = BigRational::from_integer(c.clone());
                let x1 = (&a + &b * &root_lo) / &c;
                let x2 = (&a + &b * &root_hi) / &c;
                if x1 <= x2 {
                    (x1, x2)
                } else {
                    (x2, x1)
                }
            }
        }
    }

    /// Quotient of two values; exact when both are rational.
    pub fn div(&self, other: &Self, digits: u32) -> Result<Self> {
        if let (HighPrecisionReal::Rational(x), HighPrecisionReal::Rational(y)) = (self, other) {
            if y.is_zero() {
                return Err(Error::ZeroArgument);
            }
            return Ok(HighPrecisionReal::Rational(x / y));
        }
        let (xl, xh) = self.enclosure(digits);
        let (yl, yh) = other.enclosure(digits);
        if !((yl.is_positive() && yh.is_positive()) || (yl.is_negative() && yh.is_negative())) {
            return Err(Error::ZeroArgument);
        }
        let cands = [&xl / &yl, &xl / &yh, &xh / &yl, &xh / &yh];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Ok(HighPrecisionReal::Approx { lo, hi })
    }

    /// Nearest double, via a 40-digit decimal rendering of the midpoint.
    pub fn to_f64(&self) -> f64 {
        let (lo, hi) = self.enclosure(40);
        let mid = (lo + hi) / BigRational::from_integer(BigInt::from(2));
        rational_to_f64(&mid)
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    let scale = pow10(40);
    let scaled = (r.numer() * &scale) / r.denom();
    format!("{scaled}e-40").parse().unwrap_or_else(|_| r.to_f64().unwrap_or(f64::NAN))
}

enum Expansion {
    Complete(Vec<Convergent>),
    Terminated(Vec<Convergent>),
    Exhausted(Vec<Convergent>),
}

fn expand_interval(lo0: &BigRational, hi0: &BigRational, n: usize) -> Expansion {
    let (mut lo, mut hi) = (lo0.clone(), hi0.clone());
    let (mut h1, mut h2) = (BigInt::one(), BigInt::zero());
    let (mut k1, mut k2) = (BigInt::zero(), BigInt::one());
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let a = lo.floor();
        if hi.floor() != a {
            return Expansion::Exhausted(out);
        }
        let a = a.to_integer();
        let h = &a * &h1 + &h2;
        let k = &a * &k1 + &k2;
        let conv = BigRational::new(h.clone(), k.clone());
        let bound = BigRational::new(BigInt::one(), &k * &k);
        let err = (lo0 - &conv).abs().max((hi0 - &conv).abs());
        if err >= bound {
            return Expansion::Exhausted(out);
        }
        out.push(Convergent { a: h.clone(), q: k.clone() });
        h2 = std::mem::replace(&mut h1, h);
        k2 = std::mem::replace(&mut k1, k);
        let a = BigRational::from_integer(a);
        let (fl, fh) = (&lo - &a, &hi - &a);
        if fh.is_zero() {
            return if out.len() == n {
                Expansion::Complete(out)
            } else {
                Expansion::Terminated(out)
            };
        }
        if fl.is_zero() {
            return Expansion::Exhausted(out);
        }
        lo = fh.recip();
        hi = fl.recip();
    }
    Expansion::Complete(out)
}

/// The first `n` convergents of the continued fraction of `x`.
///
/// Each partial quotient is certified from a rational enclosure of `x`; surds
/// are re-enclosed with more digits when the first attempt runs dry.
pub fn cf_convergents(x: &HighPrecisionReal, n: usize) -> Result<Vec<Convergent>> {
    if n == 0 {
        return Err(Error::InvalidInput("need at least one convergent".into()));
    }
    let mut digits = (4 * n as u32).max(32);
    let attempts = if matches!(x, HighPrecisionReal::Surd { .. }) { 4 } else { 1 };
    let mut last = Vec::new();
    for _ in 0..attempts {
        let (lo, hi) = x.enclosure(digits);
        match expand_interval(&lo, &hi, n) {
            Expansion::Complete(v) => return Ok(v),
            Expansion::Terminated(v) => return Err(Error::RationalTerminated { convergents: v }),
            Expansion::Exhausted(v) => last = v,
        }
        digits *= 2;
    }
    Err(Error::PrecisionExhausted { convergents: last })
}

impl fmt::Display for HighPrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HighPrecisionReal::Rational(r) => write!(f, "{r}"),
            HighPrecisionReal::Approx { lo, hi } => write!(f, "[{lo}, {hi}]"),
            HighPrecisionReal::Surd { a, b, d, c } => write!(f, "surd:{a},{b},{d},{c}"),
        }
    }
}

impl From<i64> for HighPrecisionReal {
    fn from(v: i64) -> Self {
        HighPrecisionReal::Rational(BigRational::from_integer(BigInt::from(v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strs(v: &[Convergent]) -> Vec<String> {
        v.iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn sqrt2() {
        let x = HighPrecisionReal::parse("sqrt:2").unwrap();
        let c = cf_convergents(&x, 4).unwrap();
        assert_eq!(strs(&c), ["1/1", "3/2", "7/5", "17/12"]);
    }

    #[test]
    fn golden_ratio() {
        let x = HighPrecisionReal::parse("surd:1,1,5,2").unwrap();
        let c = cf_convergents(&x, 5).unwrap();
        assert_eq!(strs(&c), ["1/1", "2/1", "3/2", "5/3", "8/5"]);
    }

    #[test]
    fn rational_terminates() {
        let x = HighPrecisionReal::parse("7/3").unwrap();
        match cf_convergents(&x, 10) {
            Err(Error::RationalTerminated { convergents }) => {
                assert_eq!(strs(&convergents), ["2/1", "7/3"])
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn approximate_decimal_runs_out() {
        let x = HighPrecisionReal::parse("1.41421356...").unwrap();
        match cf_convergents(&x, 40) {
            Err(Error::PrecisionExhausted { convergents }) => {
                assert!(convergents.len() >= 5);
                assert_eq!(convergents[3].to_string(), "17/12");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_and_long_expansions() {
        let x = HighPrecisionReal::parse("-sqrt:2").unwrap();
        let c = cf_convergents(&x, 3).unwrap();
        assert_eq!(strs(&c), ["-2/1", "-1/1", "-3/2"]);
        // sqrt(3) = [1; 1, 2, 1, 2, ...]; 200 terms forces re-enclosure
        let x = HighPrecisionReal::parse("sqrt:3").unwrap();
        let c = cf_convergents(&x, 200).unwrap();
        let (lo, hi) = x.enclosure(400);
        for (i, conv) in c.iter().enumerate() {
            let r = conv.as_ratio();
            let bound = BigRational::new(BigInt::one(), &conv.q * &conv.q);
            assert!((&lo - &r).abs() < bound && (&hi - &r).abs() < bound);
            assert!(num_integer::Integer::gcd(&conv.a, &conv.q).is_one());
            if i >= 2 {
                assert!(conv.q > c[i - 1].q);
            }
        }
    }

    #[test]
    fn parsing_forms() {
        let r = |s: &str| HighPrecisionReal::parse(s).unwrap();
        assert_eq!(r("0.3").to_f64(), 0.3);
        assert_eq!(r("-2").to_f64(), -2.0);
        assert_eq!(r("1e-4").to_f64(), 1e-4);
        assert_eq!(r("sqrt:2").to_f64(), std::f64::consts::SQRT_2);
        assert!(r("sqrt:4").is_rational());
        assert!(!r("sqrt:2").is_rational());
        assert!(HighPrecisionReal::parse("abc").is_err());
        assert!(HighPrecisionReal::parse("1/0").is_err());
        let q = r("sqrt:2").div(&r("1"), 40).unwrap();
        assert!(!q.is_rational());
        assert!(r("3").div(&r("6"), 40).unwrap().is_rational());
    }
}
