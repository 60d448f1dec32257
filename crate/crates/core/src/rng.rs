//! Reproducible pseudo-random source.
//!
//! All randomness in the crate (power-iteration starts, adjoint probes,
//! synthetic instances) flows through [`SeededRng`]. The stream is fixed so
//! that instances can be regenerated by any implementation:
//!
//! - generator: xoshiro256++ seeded from a `u64` through SplitMix64;
//! - `uniform()`: `(next_u64 >> 11) * 2^-53`, in `[0, 1)`;
//! - `normal()`: Box-Muller, `sqrt(-2 ln(1 - u1)) * cos(2 pi u2)`, two
//!   uniforms per draw, the sine branch is discarded;
//! - `below(n)`: `floor(uniform() * n)`.

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct SeededRng {
    inner: Xoshiro256PlusPlus,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        (-2.0 * (1.0 - u1).ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0)");
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }

    pub fn normal_vec<T: Real>(&mut self, len: usize) -> Vec<T> {
        (0..len).map(|_| T::lit(self.normal())).collect()
    }

    /// `k` distinct indices from `0..n`, in draw order (partial Fisher-Yates).
    pub fn sample_without_replacement(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n, "cannot draw {k} of {n}");
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below(n - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}
