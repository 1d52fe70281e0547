//! Prime triples with |lambda1 p1 + lambda2 p2 + lambda3 p3^4 + eta| < tol.

use ps_trident::gamma::{find_triples, validate_triple, ProblemSpec};
use ps_trident::numeric::HighPrecisionReal;
use ps_trident::primes::GammaType;

fn main() -> ps_trident::Result<()> {
    let spec = ProblemSpec::new(
        HighPrecisionReal::parse("sqrt:2")?,
        HighPrecisionReal::parse("1")?,
        -1.0,
        0.3,
        GammaType::new(0.97)?,
        0.05,
        0.1,
    )?;
    let (x, tol) = (1e5, 0.05);
    let triples = find_triples(&spec, x, tol, Some(10))?;
    for s in &triples {
        println!("sqrt2 * {} + {} - {}^4 + 0.3 = {:+.6}  valid: {}", s.p1, s.p2, s.p3, s.value, validate_triple(&spec, x, tol, s)?);
    }
    Ok(())
}
