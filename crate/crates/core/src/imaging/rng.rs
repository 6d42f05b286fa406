use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::Scalar;

/// Name of the uniform generator, recorded in experiment outputs.
pub const GENERATOR_FAMILY: &str = "chacha8";

/// Seeded random stream. Identical seeds give identical streams.
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn family(&self) -> &'static str {
        GENERATOR_FAMILY
    }

    /// Uniform sample in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform sample in `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.random::<u64>()
    }

    /// Vector of uniform samples in `[0, 1)`.
    pub fn uniform_vec<T: Scalar>(&mut self, count: usize) -> Vec<T> {
        (0..count).map(|_| T::of(self.uniform())).collect()
    }

    /// Vector of standard normal samples; `count` may be zero here.
    pub fn gaussian_vec<T: Scalar>(&mut self, count: usize) -> Vec<T> {
        let mut out = Vec::with_capacity(count + 1);
        while out.len() < count {
            let (a, b) = self.box_muller();
            out.push(T::of(a));
            out.push(T::of(b));
        }
        out.truncate(count);
        out
    }

    fn box_muller(&mut self) -> (f64, f64) {
        // 1 - U lies in (0, 1], keeping the logarithm finite.
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let t = 2.0 * std::f64::consts::PI * u2;
        (r * t.cos(), r * t.sin())
    }
}

/// `count` standard normal samples drawn by Box-Muller from the uniform stream.
pub fn gaussian_samples<T: Scalar>(rng: &mut RngState, count: usize) -> Result<Vec<T>> {
    if count == 0 {
        return invalid("gaussian sample count must be at least 1");
    }
    Ok(rng.gaussian_vec(count))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<f64> = gaussian_samples(&mut RngState::new(42), 10).unwrap();
        let b: Vec<f64> = gaussian_samples(&mut RngState::new(42), 10).unwrap();
        assert_eq!(a, b);
        let c: Vec<f64> = gaussian_samples(&mut RngState::new(43), 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_count_rejected() {
        assert!(gaussian_samples::<f64>(&mut RngState::new(1), 0).is_err());
    }

    #[test]
    fn moments_match_standard_normal() {
        let n = 1_000_000;
        let s: Vec<f64> = gaussian_samples(&mut RngState::new(7), n).unwrap();
        let mean = s.iter().sum::<f64>() / n as f64;
        let var = s.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.01, "variance {var}");
    }

    #[test]
    fn odd_counts_are_prefixes() {
        let a: Vec<f64> = RngState::new(5).gaussian_vec(7);
        let b: Vec<f64> = RngState::new(5).gaussian_vec(8);
        assert_eq!(a[..], b[..7]);
    }
}
