//! Flat `key = value` problem files.
//!
//! ```text
//! # comments and blank lines are ignored
//! lambda1 = sqrt:2
//! lambda2 = 1
//! lambda3 = -1
//! eta     = 0.3
//! gamma   = 0.97
//! theta   = 0.05
//! lambda0 = 0.1
//! q0      = 64        # or: x = 2000
//! ```
//!
//! Every value is read as an exact rational (or certified surd, or truncated
//! decimal ending in `...`) before any conversion to floating point.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::gamma::{derive_params, params_for_x, ProblemSpec, RunParams};
use crate::numeric::HighPrecisionReal;
use crate::primes::GammaType;

const KEYS: [&str; 9] = ["lambda1", "lambda2", "lambda3", "eta", "gamma", "theta", "lambda0", "q0", "x"];

/// Where the scale X comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale {
    Q0(u64),
    X(f64),
}

#[derive(Debug, Clone)]
pub struct ProblemConfig {
    pub spec: ProblemSpec,
    pub scale: Scale,
    /// The raw `key -> value` text, for echoing into run manifests.
    pub echo: BTreeMap<String, String>,
}

impl ProblemConfig {
    pub fn params(&self) -> Result<RunParams> {
        match self.scale {
            Scale::Q0(q0) => derive_params(q0, &self.spec),
            Scale::X(x) => params_for_x(x, &self.spec),
        }
    }
}

fn cfg_err(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

/// Parse a number in any accepted form to a double.
pub fn parse_real(s: &str) -> Result<f64> {
    let v = HighPrecisionReal::parse(s)?.to_f64();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidInput(format!("'{s}' is not a finite number")))
    }
}

/// Parse gamma, keeping its exact rational form when it has one.
pub fn parse_gamma(s: &str) -> Result<GammaType> {
    match HighPrecisionReal::parse(s)? {
        HighPrecisionReal::Rational(r) => {
            let (n, d) = (r.numer().to_u64(), r.denom().to_u64());
            match (n, d) {
                (Some(n), Some(d)) if d <= 1 << 20 => GammaType::from_ratio(n, d),
                _ => GammaType::new(r.to_f64().unwrap_or(f64::NAN)),
            }
        }
        other => GammaType::new(other.to_f64()),
    }
}

pub fn parse_config(text: &str) -> Result<ProblemConfig> {
    let mut echo = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let (k, v) = (k.trim().to_ascii_lowercase(), v.trim().to_string());
        if !KEYS.contains(&k.as_str()) {
            return Err(Error::Config(format!("line {}: unknown key '{k}'", lineno + 1)));
        }
        if echo.insert(k.clone(), v).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key '{k}'", lineno + 1)));
        }
    }
    let get = |k: &str| echo.get(k).ok_or_else(|| Error::Config(format!("missing key '{k}'")));
    let real = |k: &str| -> Result<f64> { parse_real(get(k)?).map_err(cfg_err) };
    let spec = ProblemSpec::new(
        HighPrecisionReal::parse(get("lambda1")?).map_err(cfg_err)?,
        HighPrecisionReal::parse(get("lambda2")?).map_err(cfg_err)?,
        real("lambda3")?,
        real("eta")?,
        parse_gamma(get("gamma")?).map_err(cfg_err)?,
        real("theta")?,
        real("lambda0")?,
    )
    .map_err(cfg_err)?;
    let scale = match (echo.get("q0"), echo.get("x")) {
        (Some(q), None) => Scale::Q0(q.parse().map_err(|_| Error::Config(format!("q0 '{q}' is not a positive integer")))?),
        (None, Some(_)) => Scale::X(real("x")?),
        (Some(_), Some(_)) => return Err(Error::Config("give either q0 or x, not both".into())),
        (None, None) => return Err(Error::Config("missing key 'q0' (or 'x')".into())),
    };
    Ok(ProblemConfig { spec, scale, echo })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "# instance\nlambda1 = sqrt:2\nlambda2 = 1\nlambda3 = -1\neta = 0.3\ngamma = 0.97\ntheta = 0.05\nlambda0 = 0.1\nq0 = 64\n";

    #[test]
    fn parses_sample() {
        let c = parse_config(SAMPLE).unwrap();
        assert_eq!(c.scale, Scale::Q0(64));
        assert_eq!(c.spec.gamma.exact(), Some((97, 100)));
        assert!((c.spec.l1() - std::f64::consts::SQRT_2).abs() < 1e-16);
        assert_eq!(c.params().unwrap().x, 8192.0);
        assert_eq!(c.echo["lambda1"], "sqrt:2");
    }

    #[test]
    fn rejects_bad_files() {
        for bad in [
            SAMPLE.replace("q0 = 64", "q0 = 64\nx = 100"),
            SAMPLE.replace("q0 = 64", ""),
            SAMPLE.replace("eta = 0.3", "eta = zero"),
            SAMPLE.replace("gamma = 0.97", "gamma = 1.2"),
            SAMPLE.replace("eta = 0.3", "eta = 0.3\neta = 1"),
            SAMPLE.replace("eta = 0.3", "etta = 0.3"),
            SAMPLE.replace("eta = 0.3", "eta 0.3"),
            SAMPLE.replace("lambda3 = -1", "lambda3 = 1"),
        ] {
            assert!(matches!(parse_config(&bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn direct_scale() {
        let c = parse_config(&SAMPLE.replace("q0 = 64", "x = 2000")).unwrap();
        assert_eq!(c.scale, Scale::X(2000.0));
        assert_eq!(c.params().unwrap().q0, None);
    }
}
