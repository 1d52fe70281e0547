//! Exact even moments of the fourth-power sum over a prime set, checked
//! against their spectral form and a sampling quadrature.

use ps_trident::moments::{cauchy_inequalities, exact_moment, fourth_moment_via_spectra, quadrature_moment, spectrum_c_star, PrimeSet};
use ps_trident::primes::GammaType;

fn main() -> ps_trident::Result<()> {
    let set = PrimeSet::first(8, &GammaType::new(0.9)?)?;
    println!("P = {:?}", set.primes);
    for m in [1, 2, 4] {
        println!("integral |S|^{} = {}", 2 * m, exact_moment(&set, m)?);
    }
    println!("fourth moment from b and c spectra: {}", fourth_moment_via_spectra(&set)?);
    println!("fourth moment by quadrature: {:.6}", quadrature_moment(&set, 2, None)?);

    let c_star = spectrum_c_star(&set)?;
    println!("c* spectrum: {} keys, total {}", c_star.len(), c_star.total());
    let check = cauchy_inequalities(&set, true)?;
    println!("eighth moment Cauchy step (lhs, rhs) = {:?}", check.eighth);
    println!("sixteenth moment Cauchy step (lhs, rhs) = {:?}", check.sixteenth);
    Ok(())
}
