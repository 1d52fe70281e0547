use crate::error::{Error, Result};

/// The first thirteen primes. As Miller-Rabin bases they are a deterministic
/// witness set for every n < 3.3e24, which covers all of u64.
const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if a < (1 << 64) && b < (1 << 64) {
        return (a * b) % m;
    }
    // shift-and-add keeps every intermediate below 2m
    let (mut a, mut b, mut acc) = (a % m, b % m, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod(acc, a, m);
        }
        a = add_mod(a, a, m);
        b >>= 1;
    }
    acc
}

fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    let (s, overflow) = a.overflowing_add(b);
    if overflow || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

fn is_prime_u128(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        let p = p as u128;
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a as u128, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic Miller-Rabin primality test.
pub fn is_prime(n: u64) -> bool {
    is_prime_u128(n as u128)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

// Brent's variant of Pollard rho; n must be composite and odd.
fn pollard_rho(n: u128) -> u128 {
    let mut c = 1u128;
    loop {
        let f = |x: u128| add_mod(mul_mod(x, x, n), c, n);
        let (mut x, mut y, mut d) = (2u128, 2u128, 1u128);
        let mut power = 1u64;
        let mut lam = 1u64;
        while d == 1 {
            if power == lam {
                x = y;
                power *= 2;
                lam = 0;
            }
            y = f(y);
            lam += 1;
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn factor_into(n: u128, out: &mut Vec<u128>) {
    if n == 1 {
        return;
    }
    if is_prime_u128(n) {
        out.push(n);
        return;
    }
    let d = pollard_rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Prime factorisation as sorted `(prime, exponent)` pairs. `factorize(1)` is empty.
pub fn factorize(mut n: u128) -> Vec<(u128, u32)> {
    assert!(n > 0, "factorize(0)");
    let mut primes = Vec::new();
    let mut p = 2u128;
    while p < 1000 && p * p <= n {
        while n.is_multiple_of(p) {
            primes.push(p);
            n /= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    factor_into(n, &mut primes);
    primes.sort_unstable();
    let mut out: Vec<(u128, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    out
}

/// `tau_k(|j|)`: the number of ordered ways to write `|j|` as a product of
/// `k` natural numbers.
pub fn divisor_tau(j: i128, k: u32) -> Result<u128> {
    if j == 0 {
        return Err(Error::ZeroArgument);
    }
    if k < 2 {
        return Err(Error::InvalidInput(format!("divisor order {k} < 2")));
    }
    let mut total: u128 = 1;
    for (_, e) in factorize(j.unsigned_abs()) {
        // stars and bars: C(e + k - 1, k - 1)
        let mut c: u128 = 1;
        for i in 1..=(e as u128) {
            c = c * (k as u128 - 1 + i) / i;
        }
        total = total.checked_mul(c).ok_or(Error::Overflow("divisor_tau"))?;
    }
    Ok(total)
}

/// Largest r with r^k <= n.
pub fn iroot_floor(n: u64, k: u32) -> u64 {
    if k == 1 || n < 2 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64).round() as u64;
    let pow = |r: u64| (r as u128).checked_pow(k).unwrap_or(u128::MAX);
    while pow(r) > n as u128 {
        r -= 1;
    }
    while pow(r + 1) <= n as u128 {
        r += 1;
    }
    r
}

/// Smallest r with r^k >= n.
pub fn iroot_ceil(n: u64, k: u32) -> u64 {
    let r = iroot_floor(n, k);
    if (r as u128).pow(k) == n as u128 {
        r
    } else {
        r + 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_tau(n: u128, k: u32) -> u128 {
        if k == 1 {
            return 1;
        }
        (1..=n).filter(|d| n.is_multiple_of(*d)).map(|d| brute_tau(n / d, k - 1)).sum()
    }

    #[test]
    fn tau_examples() {
        assert_eq!(divisor_tau(12, 2).unwrap(), 6);
        assert_eq!(divisor_tau(1, 4).unwrap(), 1);
        assert_eq!(divisor_tau(6, 4).unwrap(), 16);
        assert_eq!(divisor_tau(-12, 2).unwrap(), 6);
        assert!(matches!(divisor_tau(0, 2), Err(Error::ZeroArgument)));
    }

    #[test]
    fn tau2_matches_divisor_enumeration() {
        for j in 1..=10_000u128 {
            let count = (1..=j).filter(|d| j % d == 0).count() as u128;
            assert_eq!(divisor_tau(j as i128, 2).unwrap(), count, "j={j}");
        }
    }

    #[test]
    fn higher_tau_matches_recursive_count() {
        for j in 1..=300u128 {
            for k in 3..=5 {
                assert_eq!(divisor_tau(j as i128, k).unwrap(), brute_tau(j, k));
            }
        }
    }

    #[test]
    fn miller_rabin_matches_trial_division() {
        let trial = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d));
        for n in 0..20_000u64 {
            assert_eq!(is_prime(n), trial(n), "n={n}");
        }
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn factorize_large() {
        let n: u128 = 1_000_000_007u128 * 998_244_353 * 4;
        assert_eq!(factorize(n), vec![(2, 2), (998_244_353, 1), (1_000_000_007, 1)]);
        let big: u128 = (1u128 << 61) - 1; // Mersenne prime
        assert_eq!(factorize(big * 3), vec![(3, 1), (big, 1)]);
    }

    #[test]
    fn integer_roots() {
        assert_eq!(iroot_floor(100, 4), 3);
        assert_eq!(iroot_ceil(81, 4), 3);
        assert_eq!(iroot_ceil(82, 4), 4);
        assert_eq!(iroot_floor(10_000, 4), 10);
        assert_eq!(iroot_floor(u64::MAX, 2), 4_294_967_295);
    }
}
