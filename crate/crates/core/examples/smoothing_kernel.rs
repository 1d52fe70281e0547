//! The compactly supported smoothing kernel and its Fourier transform.

use ps_trident::smoothing::SmoothingKernel;

fn main() -> ps_trident::Result<()> {
    let kernel = SmoothingKernel::new(0.5, 4)?;
    println!("eps = {}, k = {}, plateau half-width a = {}, box width w = {}", kernel.eps, kernel.k, kernel.a, kernel.w);
    for y in [0.0, 0.3, 0.4, 0.45, 0.5] {
        println!("theta({y:.2}) = {:.12}", kernel.theta(y));
    }
    for x in [0.0, 1.0, 10.0, 100.0] {
        println!("Theta({x:>5}) = {:>+.6e}, bound {:.6e}", kernel.theta_fourier(x), kernel.fourier_bound(x));
    }
    println!("mass of |Theta| beyond |x| = 50: at most {:.3e}", kernel.theta_tail_mass(50.0));
    Ok(())
}
