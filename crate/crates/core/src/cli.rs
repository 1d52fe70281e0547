//! The `ps-trident` command line.
//!
//! Every subcommand writes its table or document to `--out` (`-` is stdout)
//! and a one-line JSON run manifest to stderr. Failures print a JSON error
//! object on stderr and map to exit codes: 2 usage, 3 configuration or
//! input, 4 size or budget limits, 5 anything else (including failed
//! verification checks).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{parse_config, parse_gamma, parse_real, ProblemConfig};
use crate::error::{Error, Result};
use crate::expsums::{eval_i, ExpSum, ExpSumSpec};
use crate::gamma::{find_triples, gamma_direct, gamma_via_integral, main_term_b, DEFAULT_QUAD_BUDGET};
use crate::moments::{exact_moment, spectrum_b, spectrum_c, spectrum_c_bar, spectrum_c_star, PrimeSet, SpectrumMap};
use crate::numeric::{cf_convergents, HighPrecisionReal};
use crate::primes::sieve_ps_table;
use crate::smoothing::SmoothingKernel;
use crate::verify;

#[derive(Debug, Parser)]
#[command(name = "ps-trident", version, about = "Piatetski-Shapiro prime ternary problem toolkit")]
struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Kind {
    S,
    Sigma,
    U,
    Omega,
    I,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// PS primes p^k in (lambda0 X, X] with their weights, as CSV `p,weight`.
    Primes {
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        lambda0: String,
        #[arg(long, default_value_t = 1)]
        power: u32,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Samples of the smoothing kernel and its Fourier transform.
    Kernel {
        #[arg(long)]
        eps: String,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 201)]
        sample: usize,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// An exponential sum sampled on an even grid of t, as CSV `t,re,im,abs`.
    #[command(allow_negative_numbers = true)]
    Sums {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        x: String,
        #[arg(long)]
        lambda0: String,
        #[arg(long)]
        tmin: String,
        #[arg(long)]
        tmax: String,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Exact moment of the fourth-power sum over PS primes up to X.
    Moments {
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        m: u32,
        #[arg(long, default_value = "-")]
        out: String,
        /// Also write every spectrum as CSV `order,j,count`.
        #[arg(long)]
        dump_spectrum: Option<String>,
    },
    /// Gamma(X) directly, through its Fourier decomposition, and the main term.
    Gamma {
        #[arg(long)]
        config: String,
        #[arg(long, default_value_t = DEFAULT_QUAD_BUDGET)]
        budget: u64,
        /// Compute the main term even when lambda0 fails its admissibility bound.
        #[arg(long)]
        allow_inadmissible: bool,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Triples (p1, p2, p3) with |lambda1 p1 + lambda2 p2 + lambda3 p3^4 + eta| < tol.
    Solve {
        #[arg(long)]
        config: String,
        #[arg(long)]
        tol: String,
        #[arg(long)]
        limit: Option<usize>,
        #[arg(long, default_value = "-")]
        out: String,
    },
    /// Continued-fraction convergents a/q, one per line.
    #[command(allow_negative_numbers = true)]
    Convergents {
        #[arg(long)]
        value: String,
        #[arg(long, default_value_t = 10)]
        n: usize,
    },
    /// Run the acceptance checks and print a pass/fail table.
    Verify {
        /// Comma-separated check numbers (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
        #[arg(long, default_value = "-")]
        out: String,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Primes { .. } => "primes",
            Command::Kernel { .. } => "kernel",
            Command::Sums { .. } => "sums",
            Command::Moments { .. } => "moments",
            Command::Gamma { .. } => "gamma",
            Command::Solve { .. } => "solve",
            Command::Convergents { .. } => "convergents",
            Command::Verify { .. } => "verify",
        }
    }
}

#[derive(Debug, Serialize)]
struct RunManifest {
    command: &'static str,
    config_echo: BTreeMap<String, String>,
    version: &'static str,
    seed_free: bool,
    timings: BTreeMap<String, f64>,
}

struct Run {
    echo: BTreeMap<String, String>,
    timings: BTreeMap<String, f64>,
    clock: Instant,
}

impl Run {
    fn new() -> Self {
        Run { echo: BTreeMap::new(), timings: BTreeMap::new(), clock: Instant::now() }
    }

    fn echo(&mut self, k: &str, v: impl ToString) {
        self.echo.insert(k.to_string(), v.to_string());
    }

    fn phase(&mut self, name: &str) {
        self.timings.insert(name.to_string(), self.clock.elapsed().as_secs_f64());
        self.clock = Instant::now();
    }
}

/// A float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Rewrite every non-integer number to 17 significant digits.
pub fn normalize_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let f = n.as_f64().unwrap_or(f64::NAN);
            fmt_f64(f).parse::<serde_json::Number>().map(Value::Number).unwrap_or(Value::Null)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(normalize_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize_floats(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with normalized floats and a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let value = serde_json::to_value(v).map_err(|e| Error::Invariant(format!("json: {e}")))?;
    let mut s = serde_json::to_string_pretty(&normalize_floats(value)).map_err(|e| Error::Invariant(format!("json: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn write_out(path: &str, content: &str) -> Result<()> {
    if path == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(content.as_bytes())?;
        out.flush()?;
        Ok(())
    } else {
        std::fs::write(path, content).map_err(Error::from)
    }
}

fn primes_csv(run: &mut Run, gamma: &str, x: &str, lambda0: &str, power: u32) -> Result<String> {
    let g = parse_gamma(gamma)?;
    let (xv, l0) = (parse_real(x)?, parse_real(lambda0)?);
    run.echo("gamma", gamma);
    run.echo("x", x);
    run.echo("lambda0", lambda0);
    run.echo("power", power);
    let table = sieve_ps_table(xv, l0, power, g)?;
    run.phase("sieve");
    let mut csv = String::from("p,weight\n");
    for (p, w) in table.primes.iter().zip(&table.weights) {
        let _ = writeln!(csv, "{p},{}", fmt_f64(*w));
    }
    Ok(csv)
}

fn grid(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n <= 1 {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

/// Long-format CSV: `table,arg,value,bound`. Rows `theta,y,theta(y),` sample
/// `y` over `[-5eps/4, 5eps/4]`; rows `fourier,x,Theta(x),bound(x)` sample
/// `x` over `[0, 10k/eps]`.
fn kernel_csv(run: &mut Run, eps: &str, k: u32, n: usize) -> Result<String> {
    let kn = SmoothingKernel::new(parse_real(eps)?, k)?;
    run.echo("eps", eps);
    run.echo("k", k);
    run.echo("sample", n);
    let mut csv = String::from("table,arg,value,bound\n");
    for i in 0..n {
        let y = grid(-1.25 * kn.eps, 1.25 * kn.eps, n, i);
        let _ = writeln!(csv, "theta,{},{},", fmt_f64(y), fmt_f64(kn.theta(y)));
    }
    for i in 0..n {
        let x = grid(0.0, 10.0 * k as f64 / kn.eps, n, i);
        let _ = writeln!(csv, "fourier,{},{},{}", fmt_f64(x), fmt_f64(kn.theta_fourier(x)), fmt_f64(kn.fourier_bound(x)));
    }
    run.phase("evaluate");
    Ok(csv)
}

#[allow(clippy::too_many_arguments)]
fn sums_csv(
    run: &mut Run,
    kind: Kind,
    k: Option<u32>,
    gamma: Option<&str>,
    x: &str,
    lambda0: &str,
    tmin: &str,
    tmax: &str,
    n: usize,
) -> Result<String> {
    let (xv, l0) = (parse_real(x)?, parse_real(lambda0)?);
    let (t0, t1) = (parse_real(tmin)?, parse_real(tmax)?);
    let g = gamma.map(parse_gamma).transpose()?;
    run.echo("kind", format!("{kind:?}").to_lowercase());
    for (key, v) in [("x", Some(x)), ("lambda0", Some(lambda0)), ("tmin", Some(tmin)), ("tmax", Some(tmax)), ("gamma", gamma)] {
        if let Some(v) = v {
            run.echo(key, v);
        }
    }
    if let Some(k) = k {
        run.echo("k", k);
    }
    run.echo("samples", n);
    let need_gamma = || g.ok_or_else(|| Error::InvalidInput(format!("--kind {kind:?} needs --gamma").to_lowercase()));
    let need_k = || k.ok_or_else(|| Error::InvalidInput(format!("--kind {kind:?} needs --k").to_lowercase()));
    let ts: Vec<f64> = (0..n).map(|i| grid(t0, t1, n, i)).collect();
    let values = match kind {
        Kind::I => {
            let k = need_k()?;
            if !(1..=4).contains(&k) {
                return Err(Error::InvalidInput(format!("I_k needs k in 1..=4, got {k}")));
            }
            ts.par_iter().map(|&t| eval_i(k, t, xv, l0)).collect()
        }
        other => {
            let spec = match other {
                Kind::S => ExpSumSpec::s(need_k()?, xv, l0, need_gamma()?),
                Kind::Sigma => ExpSumSpec::sigma(xv, l0),
                Kind::U => ExpSumSpec::u(xv, l0),
                _ => ExpSumSpec::omega(xv, l0, need_gamma()?),
            };
            let sum = ExpSum::build(&spec)?;
            run.phase("build");
            ts.par_iter().map(|&t| sum.eval(t)).collect::<Vec<_>>()
        }
    };
    run.phase("evaluate");
    let mut csv = String::from("t,re,im,abs\n");
    for (t, v) in ts.iter().zip(values) {
        let _ = writeln!(csv, "{},{},{},{}", fmt_f64(*t), fmt_f64(v.re), fmt_f64(v.im), fmt_f64(v.norm()));
    }
    Ok(csv)
}

#[derive(Serialize)]
struct SpectrumSummary {
    order: crate::moments::SpectrumOrder,
    support: usize,
    total: u128,
    at_zero: u64,
    max_count: u64,
}

fn summarize(s: &SpectrumMap) -> SpectrumSummary {
    SpectrumSummary {
        order: s.order,
        support: s.len(),
        total: s.total(),
        at_zero: s.get(0),
        max_count: s.entries.values().copied().max().unwrap_or(0),
    }
}

/// The spectra paired in the moment identity or Cauchy step for `m`.
fn spectra_for(set: &PrimeSet, m: u32) -> Result<Vec<SpectrumMap>> {
    Ok(match m {
        1 => vec![spectrum_b(set, 1)?],
        2 => vec![spectrum_b(set, 1)?, spectrum_c(set)?],
        4 => vec![spectrum_b(set, 2)?, spectrum_c_star(set)?],
        _ => vec![spectrum_b(set, 4)?, spectrum_c_bar(set)?],
    })
}

fn moments_json(run: &mut Run, gamma: &str, x: &str, m: u32, dump: Option<&str>) -> Result<String> {
    let g = parse_gamma(gamma)?;
    let xv = parse_real(x)?;
    run.echo("gamma", gamma);
    run.echo("x", x);
    run.echo("m", m);
    if !(xv >= 1.0 && xv <= u64::MAX as f64) {
        return Err(Error::InvalidInput(format!("X = {x} out of range")));
    }
    let set = PrimeSet::upto(xv as u64, &g)?;
    run.phase("primes");
    let moment = exact_moment(&set, m)?;
    run.phase("moment");
    let spectra = spectra_for(&set, m)?;
    run.phase("spectra");
    if let Some(path) = dump {
        let mut csv = String::from("order,j,count\n");
        for s in &spectra {
            let order = serde_json::to_value(s.order).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
            for (j, c) in &s.entries {
                let _ = writeln!(csv, "{order},{j},{c}");
            }
        }
        write_out(path, &csv)?;
    }
    let doc = json!({
        "size": set.len(),
        "max_prime": set.primes.last().copied().unwrap_or(0),
        "m": m,
        "moment": moment.to_string().parse::<serde_json::Number>().map_err(|e| Error::Invariant(e.to_string()))?,
        "spectra": spectra.iter().map(summarize).collect::<Vec<_>>(),
    });
    to_json(&doc)
}

fn load_config(run: &mut Run, path: &str) -> Result<ProblemConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{path}: {e}")))?;
    let cfg = parse_config(&text)?;
    for (k, v) in &cfg.echo {
        run.echo(k, v);
    }
    run.phase("config");
    Ok(cfg)
}

fn gamma_json(run: &mut Run, path: &str, budget: u64, allow_inadmissible: bool) -> Result<String> {
    let cfg = load_config(run, path)?;
    let params = cfg.params()?;
    let direct = gamma_direct(&cfg.spec, &params)?;
    run.phase("direct");
    let integral = gamma_via_integral(&cfg.spec, &params, budget)?;
    run.phase("integral");
    let main = main_term_b(&cfg.spec, &params, allow_inadmissible)?;
    run.phase("main_term");
    to_json(&json!({
        "params": params,
        "lambda0_check": cfg.spec.lambda0_check(),
        "ratio_irrational": cfg.spec.ratio_is_irrational(),
        "direct": direct,
        "integral": integral,
        "main_term": main,
    }))
}

fn solve_json(run: &mut Run, path: &str, tol: &str, limit: Option<usize>) -> Result<String> {
    let cfg = load_config(run, path)?;
    let tolv = parse_real(tol)?;
    run.echo("tol", tol);
    if let Some(l) = limit {
        run.echo("limit", l);
    }
    let params = cfg.params()?;
    let solutions = find_triples(&cfg.spec, params.x, tolv, limit)?;
    run.phase("solve");
    to_json(&json!({
        "solutions": solutions,
        "run": { "params": params, "config": cfg.echo, "tol": tolv, "count": solutions.len() },
    }))
}

fn convergents_text(run: &mut Run, value: &str, n: usize) -> Result<String> {
    run.echo("value", value);
    run.echo("n", n);
    let x = HighPrecisionReal::parse(value)?;
    let list = match cf_convergents(&x, n) {
        Ok(list) => list,
        Err(Error::RationalTerminated { convergents }) => {
            let shown: Vec<String> = convergents.iter().map(|c| c.to_string()).collect();
            return Err(Error::InvalidInput(format!(
                "{value} is rational; its expansion ends after {} convergents: {}",
                convergents.len(),
                shown.join(", ")
            )));
        }
        Err(e) => return Err(e),
    };
    run.phase("expand");
    Ok(list.iter().map(|c| format!("{c}\n")).collect())
}

fn verify_text(run: &mut Run, only: &[u32]) -> Result<(String, bool)> {
    let ids: Vec<u32> = if only.is_empty() { (1..=verify::CRITERIA).collect() } else { only.to_vec() };
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i > verify::CRITERIA) {
        return Err(Error::InvalidInput(format!("no check {bad}; checks are 1..={}", verify::CRITERIA)));
    }
    run.echo("only", ids.iter().map(u32::to_string).collect::<Vec<_>>().join(","));
    let mut results = Vec::new();
    for id in ids {
        let r = verify::run_criterion(id);
        run.timings.insert(format!("check_{id}"), r.seconds);
        results.push(r);
    }
    let all = results.iter().all(|r| r.pass);
    Ok((verify::render(&results), all))
}

fn execute(cmd: &Command, run: &mut Run) -> Result<()> {
    match cmd {
        Command::Primes { gamma, x, lambda0, power, out } => write_out(out, &primes_csv(run, gamma, x, lambda0, *power)?),
        Command::Kernel { eps, k, sample, out } => write_out(out, &kernel_csv(run, eps, *k, *sample)?),
        Command::Sums { kind, k, gamma, x, lambda0, tmin, tmax, samples, out } => {
            write_out(out, &sums_csv(run, *kind, *k, gamma.as_deref(), x, lambda0, tmin, tmax, *samples)?)
        }
        Command::Moments { gamma, x, m, out, dump_spectrum } => {
            write_out(out, &moments_json(run, gamma, x, *m, dump_spectrum.as_deref())?)
        }
        Command::Gamma { config, budget, allow_inadmissible, out } => {
            write_out(out, &gamma_json(run, config, *budget, *allow_inadmissible)?)
        }
        Command::Solve { config, tol, limit, out } => write_out(out, &solve_json(run, config, tol, *limit)?),
        Command::Convergents { value, n } => write_out("-", &convergents_text(run, value, *n)?),
        Command::Verify { only, out } => {
            let (text, all) = verify_text(run, only)?;
            write_out(out, &text)?;
            if all {
                Ok(())
            } else {
                Err(Error::Invariant("one or more checks failed".into()))
            }
        }
    }
}

fn report_error(e: &Error) {
    let doc = json!({ "error": e.kind(), "message": e.to_string(), "exit_code": e.exit_code() });
    eprintln!("{doc}");
}

/// Parse `args` (including the program name), run the subcommand and return
/// the process exit code.
pub fn dispatch<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut run = Run::new();
    let outcome = match cli.threads {
        Some(0) => Err(Error::InvalidInput("--threads must be at least 1".into())),
        Some(n) => verify::with_threads(n, || execute(&cli.command, &mut run)).and_then(|r| r),
        None => execute(&cli.command, &mut run),
    };
    if let Some(n) = cli.threads {
        run.echo("threads", n);
    }
    let manifest = RunManifest {
        command: cli.command.name(),
        config_echo: run.echo,
        version: env!("CARGO_PKG_VERSION"),
        seed_free: true,
        timings: run.timings,
    };
    if let Ok(line) = serde_json::to_string(&normalize_floats(serde_json::to_value(&manifest).unwrap_or(Value::Null))) {
        eprintln!("{line}");
    }
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            report_error(&e);
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_normalized() {
        let v = normalize_floats(json!({"a": 0.1, "b": [1, 2.5], "c": 3}));
        assert_eq!(v.to_string(), r#"{"a":1.0000000000000001e-1,"b":[1,2.5000000000000000e+0],"c":3}"#);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(dispatch(["ps-trident"]), 2);
        assert_eq!(dispatch(["ps-trident", "bogus"]), 2);
        assert_eq!(dispatch(["ps-trident", "primes", "--x", "100"]), 2);
    }

    #[test]
    fn contract_examples() {
        assert_eq!(dispatch(["ps-trident", "convergents", "--value", "sqrt:2", "--n", "4"]), 0);
        assert_eq!(dispatch(["ps-trident", "primes", "--gamma", "1.2", "--x", "100", "--lambda0", "0.1"]), 3);
        assert_eq!(dispatch(["ps-trident", "moments", "--gamma", "0.9", "--x", "1e6", "--m", "8"]), 4);
    }
}
