//! Exponential sums over PS primes, the comparison integral I_k, and the exact
//! splitting of the fourth-power sum into main term and sawtooth part.

use ps_trident::expsums::{decompose_s4, eval_i, eval_sum, ExpSum, ExpSumSpec};
use ps_trident::primes::GammaType;

fn main() -> ps_trident::Result<()> {
    let gamma = GammaType::new(0.95)?;
    let spec = ExpSumSpec::s(1, 1e5, 0.1, gamma);
    let t = 2e-6;
    println!("S_1({t:e}) = {:.6}", eval_sum(&spec, t)?.value);
    println!("I_1({t:e}) = {:.6}", eval_i(1, t, 1e5, 0.1));

    // many points along an arithmetic progression of t
    let sum = ExpSum::build(&spec)?;
    let sweep = sum.sweep(0.0, 1e-5, 5);
    for (i, v) in sweep.iter().enumerate() {
        println!("S_1({:.0e}) = {v:.8}", i as f64 * 1e-5);
    }

    let d = decompose_s4(0.0371, 1e8, 0.1, gamma)?;
    println!("S_4 = {:.10}", d.s4);
    println!("main term + Omega = {:.10}", d.mainterm + d.omega);
    println!("|residual| = {:.3e}, Taylor gap = {:.6}", d.residual.norm(), d.taylor_gap.norm());
    Ok(())
}
