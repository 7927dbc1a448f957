#![allow(dead_code)]

use cs_secrecy::prng::Xoshiro256PlusPlus;

/// Deterministic test-case generator independent of key derivation streams.
pub struct Cases(Xoshiro256PlusPlus);

impl Cases {
    pub fn new(seed: u64) -> Self {
        Cases(Xoshiro256PlusPlus::from_seed(seed ^ 0x5EED_CA5E))
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.0.next_u64() % n as u64) as usize
    }

    pub fn u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.0.next_f64()
    }

    pub fn normal(&mut self) -> f64 {
        self.0.next_normal_pair().0
    }

    /// Sorted random support of size `k` in `0..n`.
    pub fn support(&mut self, n: usize, k: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below(n - i);
            idx.swap(i, j);
        }
        let mut s = idx[..k].to_vec();
        s.sort_unstable();
        s
    }

    /// `k`-sparse vector with random +-1 entries.
    pub fn signed_sparse(&mut self, n: usize, k: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for j in self.support(n, k) {
            x[j] = if self.0.next_u64() & 1 == 0 { 1.0 } else { -1.0 };
        }
        x
    }

    /// `k`-sparse vector with magnitudes in [0.5, 2] and random signs.
    pub fn sparse(&mut self, n: usize, k: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for j in self.support(n, k) {
            let mag = self.uniform(0.5, 2.0);
            x[j] = if self.0.next_u64() & 1 == 0 { mag } else { -mag };
        }
        x
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
