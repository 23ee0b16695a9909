//! Seeded Monte Carlo estimators.
//!
//! Every estimate draws from a ChaCha8 stream selected by `(seed, stream)`,
//! so results do not depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::scalar::{lit, Real};

/// Default number of samples per expectation value.
pub const DEFAULT_SAMPLES: usize = 1_000_000;

/// Generator for the given seed and stream index.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate<T> {
    pub value: T,
    pub stderr: T,
    pub samples: usize,
}

impl<T: Real> McEstimate<T> {
    pub fn exact(value: T) -> Self {
        Self {
            value,
            stderr: T::zero(),
            samples: 0,
        }
    }

    pub fn scaled(self, factor: T) -> Self {
        Self {
            value: self.value * factor,
            stderr: self.stderr * factor.abs(),
            samples: self.samples,
        }
    }

    /// |value − reference| ≤ k·stderr.
    pub fn agrees_with(&self, reference: T, k: T) -> bool {
        (self.value - reference).abs() <= k * self.stderr
    }
}

/// Running mean and variance (Welford), accumulated in f64.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn finish<T: Real>(&self) -> McEstimate<T> {
        let var = if self.n > 1 { self.m2 / (self.n - 1) as f64 } else { 0.0 };
        McEstimate {
            value: lit(self.mean),
            stderr: lit((var / self.n.max(1) as f64).sqrt()),
            samples: self.n,
        }
    }
}

/// Draws a point from the isotropic normal N(center, σ²I) in the plane.
pub fn sample_gaussian_point<R: rand::Rng + ?Sized>(rng: &mut R, center: [f64; 2], sigma: f64) -> [f64; 2] {
    let x: f64 = StandardNormal.sample(rng);
    let y: f64 = StandardNormal.sample(rng);
    [center[0] + sigma * x, center[1] + sigma * y]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<[f64; 2]> = {
            let mut r = stream_rng(7, 3);
            (0..4).map(|_| sample_gaussian_point(&mut r, [0.0, 0.0], 1.0)).collect()
        };
        let b: Vec<[f64; 2]> = {
            let mut r = stream_rng(7, 3);
            (0..4).map(|_| sample_gaussian_point(&mut r, [0.0, 0.0], 1.0)).collect()
        };
        let c: Vec<[f64; 2]> = {
            let mut r = stream_rng(7, 4);
            (0..4).map(|_| sample_gaussian_point(&mut r, [0.0, 0.0], 1.0)).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn accumulator_mean_and_error() {
        let mut acc = Accumulator::default();
        for x in [1.0, 2.0, 3.0, 4.0] {
            acc.push(x);
        }
        let est: McEstimate<f64> = acc.finish();
        assert_eq!(est.value, 2.5);
        // sample variance 5/3, stderr √(5/12)
        assert!((est.stderr - (5.0_f64 / 12.0).sqrt()).abs() < 1e-15);
        assert!(est.agrees_with(2.6, 1.0));
    }
}
