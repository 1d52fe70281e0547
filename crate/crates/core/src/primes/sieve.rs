use rayon::prelude::*;

const SEGMENT: u64 = 1 << 18;

/// All primes `<= n` by the plain sieve of Eratosthenes.
pub fn small_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// All primes in `[lo, hi]`, ascending. Segments are sieved independently in
/// parallel and concatenated in order.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    let lo = lo.max(2);
    if hi < lo {
        return Vec::new();
    }
    let base = small_primes(crate::numeric::iroot_floor(hi, 2));
    let segments = (hi - lo) / SEGMENT + 1;
    let parts: Vec<Vec<u64>> = (0..segments)
        .into_par_iter()
        .map(|s| {
            let start = lo + s * SEGMENT;
            let end = (start + SEGMENT - 1).min(hi);
            sieve_segment(start, end, &base)
        })
        .collect();
    parts.concat()
}

fn sieve_segment(start: u64, end: u64, base: &[u64]) -> Vec<u64> {
    let len = (end - start + 1) as usize;
    let mut composite = vec![false; len];
    for &p in base {
        if p * p > end {
            break;
        }
        let first = (p * p).max(start.div_ceil(p) * p);
        let mut m = first;
        while m <= end {
            composite[(m - start) as usize] = true;
            m += p;
        }
    }
    composite
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(i, _)| start + i as u64)
        .filter(|&v| v >= 2)
        .collect()
}
