//! The weighted triple count Gamma(X), computed directly and through its
//! Fourier decomposition, with the main term B(X).

use ps_trident::gamma::{gamma_direct, gamma_via_integral, main_term_b, params_for_x, ProblemSpec, DEFAULT_QUAD_BUDGET};
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
        0.05,
    )?;
    let params = params_for_x(1000.0, &spec)?;
    println!("{params:?}");

    let direct = gamma_direct(&spec, &params)?;
    println!("direct:   {:.9} ({} triples in support)", direct.value, direct.support);

    let int = gamma_via_integral(&spec, &params, DEFAULT_QUAD_BUDGET)?;
    println!("integral: {:.9} + tail of at most {:.3e}", int.total, int.gamma3_bound);
    println!("  minor arcs {:.6}, imaginary part {:.1e}", int.gamma2, int.imag_diagnostic);

    let main = main_term_b(&spec, &params, false)?;
    println!("main term B = {:.6}, B / (eps X^1.25) = {:.6}", main.b, main.ratio);
    Ok(())
}
