//! Samplers for the computational-basis output distribution `P`.
//!
//! Every sampler consumes an explicit seed through [`RNG_NAME`]. Bit-by-bit
//! samplers draw qubits in index order from conditional marginals; for each
//! one there is a matching `*_law` function that enumerates the exact
//! sampling law by marginalizing over the random tape.

mod bitwise;
mod exact;
mod patching;
mod sparse;
mod trajectory;

pub use exact::{exact_law, sample_exact, sample_exact_with, ExactMarginals};
pub use patching::{patching_law, patching_plan, sample_patching, sample_patching_with, PatchingStep};
pub use sparse::{sample_sparse, sample_sparse_with, sparse_law, sparse_marginal, sparse_marginal_with, SparseMarginals};
pub use trajectory::{sample_trajectory, sample_trajectory_with, trajectory_law, MAX_ENUMERATED_NOISE_SITES};

pub(crate) use trajectory::run_trajectory;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::circuit::RNG_NAME;
use crate::dense::{bits_to_string, Distribution, QuasiDistribution};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Total magnitude of negative quasi-probabilities clamped to zero.
    pub clamped_mass: f64,
    /// Number of conditional steps where clamping changed something.
    pub clamped_steps: usize,
    /// Largest clamped magnitude in a single step.
    pub max_step_clamped: f64,
    /// Patching steps whose boundary condition had (near) zero probability
    /// and fell back to the unconditional block marginal.
    pub fallback_events: usize,
}

impl Diagnostics {
    fn record_clamp(&mut self, clamped: f64) {
        if clamped > 0.0 {
            self.clamped_mass += clamped;
            self.clamped_steps += 1;
            self.max_step_clamped = self.max_step_clamped.max(clamped);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleBatch {
    pub n: usize,
    pub method: String,
    pub generator: String,
    pub seed: u64,
    pub bitstrings: Vec<Vec<u8>>,
    pub diagnostics: Diagnostics,
}

impl SampleBatch {
    fn new(n: usize, method: &str, seed: u64) -> Self {
        Self {
            n,
            method: method.to_string(),
            generator: RNG_NAME.to_string(),
            seed,
            bitstrings: Vec::new(),
            diagnostics: Diagnostics::default(),
        }
    }

    pub fn len(&self) -> usize {
        self.bitstrings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bitstrings.is_empty()
    }

    /// One `0`/`1` string per sample.
    pub fn lines(&self) -> impl Iterator<Item = String> + '_ {
        self.bitstrings.iter().map(|b| bits_to_string(b))
    }

    /// Empirical distribution over all `n` qubits.
    pub fn empirical(&self) -> Result<Distribution> {
        if self.n > 24 {
            return Err(Error::GuardExceeded { what: "empirical histogram", needed: self.n, limit: 24 });
        }
        if self.is_empty() {
            return Err(Error::InvalidArgument("empty batch".into()));
        }
        let mut counts = vec![0.0; 1 << self.n];
        for b in &self.bitstrings {
            counts[b.iter().fold(0usize, |acc, &x| acc << 1 | x as usize)] += 1.0;
        }
        let total = self.len() as f64;
        Distribution::new((0..self.n).collect(), counts.into_iter().map(|c| c / total).collect())
    }
}

/// The generator every sampler draws from.
pub fn rng_from_seed(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Result of clamping a signed vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Sanitized {
    pub probs: Vec<f64>,
    /// Magnitude of the negative entries that were zeroed.
    pub clamped_mass: f64,
}

/// Clamp negatives to zero and renormalize.
pub fn sanitize_values(values: &[f64]) -> Result<Sanitized> {
    let clamped_mass: f64 = values.iter().filter(|&&x| x < 0.0).map(|x| -x).sum();
    let positive: Vec<f64> = values.iter().map(|&x| x.max(0.0)).collect();
    let total: f64 = positive.iter().sum();
    if !(total > 0.0) {
        return Err(Error::NoPositiveMass);
    }
    Ok(Sanitized { probs: positive.into_iter().map(|x| x / total).collect(), clamped_mass })
}

/// [`sanitize_values`] for a quasi-distribution.
pub fn sanitize(q: &QuasiDistribution) -> Result<(Distribution, f64)> {
    let s = sanitize_values(q.values())?;
    Ok((Distribution::new(q.qubits().to_vec(), s.probs)?, s.clamped_mass))
}

pub fn sample_uniform(n: usize, seed: u64, count: usize) -> SampleBatch {
    let mut rng = rng_from_seed(seed);
    let mut batch = SampleBatch::new(n, "uniform", seed);
    batch.bitstrings = (0..count).map(|_| (0..n).map(|_| rng.random_range(0..2u8)).collect()).collect();
    batch
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sanitize_examples() {
        let s = sanitize_values(&[0.25, 0.75]).unwrap();
        assert_eq!(s.probs, vec![0.25, 0.75]);
        assert_eq!(s.clamped_mass, 0.0);
        let s = sanitize_values(&[0.6, 0.6, -0.2]).unwrap();
        assert!((s.probs[0] - 0.5).abs() < 1e-15 && (s.probs[1] - 0.5).abs() < 1e-15 && s.probs[2] == 0.0);
        assert!((s.clamped_mass - 0.2).abs() < 1e-15);
        assert!(matches!(sanitize_values(&[-1.0, -1.0]), Err(Error::NoPositiveMass)));
        let q = QuasiDistribution::new(vec![0], vec![1.2, -0.2]).unwrap();
        assert_eq!(sanitize(&q).unwrap().0.probs(), &[1.0, 0.0]);
    }

    #[test]
    fn uniform_batches() {
        assert!(sample_uniform(3, 1, 0).is_empty());
        assert_eq!(sample_uniform(5, 9, 20), sample_uniform(5, 9, 20));
        let b = sample_uniform(2, 4, 10_000);
        let e = b.empirical().unwrap();
        // 5 sigma for a binomial with p = 1/4
        let sigma = (0.25 * 0.75 / 10_000f64).sqrt();
        assert!(e.probs().iter().all(|&f| (f - 0.25).abs() < 5.0 * sigma));
        assert_eq!(b.generator, RNG_NAME);
    }
}
