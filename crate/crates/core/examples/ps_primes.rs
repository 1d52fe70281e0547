//! Piatetski-Shapiro primes: membership, weighted tables and the density trend.

use ps_trident::primes::{density_report, first_ps_primes, is_ps_prime, ps_weight, sieve_ps_table, GammaType};

fn main() -> ps_trident::Result<()> {
    let gamma = GammaType::from_ratio(9, 10)?;
    println!("first 15 PS primes for gamma = 0.9: {:?}", first_ps_primes(15, &gamma)?);
    for p in [2, 3, 5, 7, 11] {
        println!("p = {p:>2}: PS prime {}, weight {:.6}", is_ps_prime(p, &gamma)?, ps_weight(p, &gamma));
    }

    // PS primes whose fourth power lies in (X/10, X]
    let table = sieve_ps_table(1e8, 0.1, 4, gamma)?;
    println!("p^4 in (1e7, 1e8]: {:?}, total weight {:.6}", table.primes, table.total_weight());

    for row in density_report(&[1e4, 1e5, 1e6], gamma)? {
        println!("X = {:>9}: {:>6} PS primes, count / (X^gamma / log X) = {:.4}", row.x, row.count, row.ratio);
    }
    Ok(())
}
