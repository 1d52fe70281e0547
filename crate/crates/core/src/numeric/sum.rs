//! Deterministic summation. Every reduction in the crate goes through a fixed
//! binary tree whose shape depends only on the input length, never on how
//! many worker threads happen to run it.

use num_complex::Complex64;
use std::ops::Add;

const LEAF: usize = 32;

/// Pairwise (cascade) sum with a sequential leaf of 32 terms.
pub fn pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + Default + Add<Output = T>,
{
    if xs.len() <= LEAF {
        return xs.iter().fold(T::default(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Same tree as [`pairwise_sum`], with the two halves evaluated in parallel
/// above a size threshold. Bit-identical to the sequential version.
pub fn par_pairwise_sum<T>(xs: &[T]) -> T
where
    T: Copy + Default + Add<Output = T> + Send + Sync,
{
    if xs.len() <= 1 << 14 {
        return pairwise_sum(xs);
    }
    let mid = xs.len() / 2;
    let (a, b) = rayon::join(|| par_pairwise_sum(&xs[..mid]), || par_pairwise_sum(&xs[mid..]));
    a + b
}

/// Streaming pairwise accumulator: blocks pushed in order are merged like a
/// binary counter, so the result is a balanced tree over the push sequence.
#[derive(Debug, Default)]
pub struct PairwiseAccumulator<T> {
    stack: Vec<(u32, T)>,
}

impl<T: Copy + Default + Add<Output = T>> PairwiseAccumulator<T> {
    pub fn new() -> Self {
        PairwiseAccumulator { stack: Vec::new() }
    }

    pub fn push(&mut self, x: T) {
        let mut cur = (0u32, x);
        while let Some(&(level, top)) = self.stack.last() {
            if level != cur.0 {
                break;
            }
            self.stack.pop();
            cur = (level + 1, top + cur.1);
        }
        self.stack.push(cur);
    }

    pub fn total(&self) -> T {
        self.stack.iter().rev().fold(T::default(), |acc, &(_, x)| x + acc)
    }
}

/// Element-wise pairwise accumulation of equally sized vectors.
#[derive(Debug, Default)]
pub struct VecAccumulator {
    stack: Vec<(u32, Vec<Complex64>)>,
}

impl VecAccumulator {
    pub fn new() -> Self {
        VecAccumulator { stack: Vec::new() }
    }

    pub fn push(&mut self, x: Vec<Complex64>) {
        let mut cur = (0u32, x);
        while self.stack.last().is_some_and(|(l, _)| *l == cur.0) {
            let (level, mut top) = self.stack.pop().unwrap();
            for (a, b) in top.iter_mut().zip(&cur.1) {
                *a += *b;
            }
            cur = (level + 1, top);
        }
        self.stack.push(cur);
    }

    pub fn total(self, len: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::default(); len];
        for (_, v) in self.stack.into_iter().rev() {
            for (a, b) in out.iter_mut().zip(v) {
                *a = b + *a;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_exact_on_integers() {
        let xs: Vec<f64> = (1..=100_000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 5_000_050_000.0);
        assert_eq!(par_pairwise_sum(&xs), pairwise_sum(&xs));
    }

    #[test]
    fn parallel_is_bit_identical() {
        let xs: Vec<f64> = (0..200_003).map(|i| ((i as f64) * 0.7).sin() * 1e-3 + 1.0 / (i as f64 + 1.0)).collect();
        let a = pairwise_sum(&xs);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| par_pairwise_sum(&xs));
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn accumulator_is_balanced_and_complete() {
        let mut acc = PairwiseAccumulator::new();
        for i in 0..1000 {
            acc.push(i as f64);
        }
        assert_eq!(acc.total(), 499_500.0);
        let mut v = VecAccumulator::new();
        for i in 0..7 {
            v.push(vec![Complex64::new(i as f64, 1.0); 3]);
        }
        assert_eq!(v.total(3), vec![Complex64::new(21.0, 7.0); 3]);
    }
}
