//! The scale X, Delta, eps and H derived from a convergent denominator q0.

use ps_trident::gamma::{derive_params, ProblemSpec};
use ps_trident::numeric::HighPrecisionReal;
use ps_trident::primes::GammaType;

fn main() -> ps_trident::Result<()> {
    let spec = ProblemSpec::new(
        HighPrecisionReal::parse("sqrt:2")?,
        HighPrecisionReal::parse("1")?,
        -1.0,
        0.3,
        GammaType::from_ratio(97, 100)?,
        0.05,
        0.05,
    )?;
    println!("lambda1/lambda2 convergents: {:?}", spec.ratio_convergents(6)?.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    for q0 in [12, 29, 64, 70] {
        let p = derive_params(q0, &spec)?;
        println!(
            "q0 = {q0:>3}: X = {:>10.1}, Delta = {:.6e}, eps = {:.6}, H = {:.4}, kernel order {}",
            p.x, p.delta, p.eps, p.h, p.smoothing_k
        );
    }
    println!("lambda0 admissibility: {:?}", spec.lambda0_check());
    Ok(())
}
