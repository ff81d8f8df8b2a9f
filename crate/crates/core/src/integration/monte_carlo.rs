use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::sampler::sample_hidden_pair;
use crate::error::{ModelError, Result};
use crate::model::{response, Method, ModelParams, ProbabilityEstimate, Setting};

/// Below this many coincidences the estimate is flagged as unreliable.
pub const LOW_HIT_THRESHOLD: u64 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McSpec {
    n_samples: u64,
    seed: u64,
    n_chunks: u64,
}

impl McSpec {
    pub fn new(n_samples: u64, seed: u64, n_chunks: u64) -> Result<Self> {
        let invalid = |reason: &str| ModelError::InvalidSpec {
            what: "Monte Carlo spec",
            reason: reason.to_string(),
        };
        if n_samples < 1 {
            return Err(invalid("n_samples must be at least 1"));
        }
        if n_chunks < 1 {
            return Err(invalid("n_chunks must be at least 1"));
        }
        if n_chunks > n_samples {
            return Err(invalid("n_chunks must not exceed n_samples"));
        }
        Ok(McSpec {
            n_samples,
            seed,
            n_chunks,
        })
    }

    pub fn n_samples(&self) -> u64 {
        self.n_samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn n_chunks(&self) -> u64 {
        self.n_chunks
    }

    /// The RNG of chunk `index`: the master seed selects the key, the chunk
    /// index selects one of the 2^64 ChaCha streams under that key.
    pub fn chunk_rng(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }

    /// Number of draws in chunk `index`; the remainder goes to the leading
    /// chunks.
    pub fn chunk_len(&self, index: u64) -> u64 {
        let base = self.n_samples / self.n_chunks;
        base + u64::from(index < self.n_samples % self.n_chunks)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: ProbabilityEstimate,
    /// Draws that fell in both detection caps.
    pub hits: u64,
    pub n_samples: u64,
}

impl McEstimate {
    pub fn low_hit_count(&self) -> bool {
        self.hits < LOW_HIT_THRESHOLD
    }
}

/// Monte Carlo estimate of the coincidence probability: the mean of
/// `P1(θ1, u1) P2(θ̄2, u2)` over exact draws from the density.
///
/// Chunks run in parallel and are reduced in chunk order, so the result
/// depends only on `(seed, n_samples, n_chunks)`.
pub fn estimate_p12_mc(setting: Setting, params: &ModelParams, mc: &McSpec) -> McEstimate {
    let phi = params.phi();
    let (c, eps) = (params.c(), params.epsilon());
    let per_chunk: Vec<u64> = (0..mc.n_chunks)
        .into_par_iter()
        .map(|i| {
            let mut rng = mc.chunk_rng(i);
            let mut hits = 0u64;
            for _ in 0..mc.chunk_len(i) {
                let pair = sample_hidden_pair(&mut rng, phi);
                let x = response(pair.u1, setting.theta1(), c, eps)
                    * response(pair.u2, setting.theta2(), c, eps);
                hits += u64::from(x > 0.0);
            }
            hits
        })
        .collect();
    let hits: u64 = per_chunk.iter().sum();

    // Each draw contributes either 0 or C².
    let n = mc.n_samples as f64;
    let h = hits as f64;
    let c2 = c * c;
    let value = c2 * h / n;
    let std_error = if mc.n_samples > 1 {
        let variance = c2 * c2 * h * (n - h) / (n * (n - 1.0));
        (variance / n).sqrt()
    } else {
        0.0
    };
    McEstimate {
        estimate: ProbabilityEstimate {
            value,
            std_error,
            method: Method::MonteCarlo,
        },
        hits,
        n_samples: mc.n_samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(McSpec::new(0, 1, 1).is_err());
        assert!(McSpec::new(10, 1, 0).is_err());
        assert!(McSpec::new(10, 1, 11).is_err());
        assert!(McSpec::new(10, 1, 10).is_ok());
    }

    #[test]
    fn chunks_cover_all_samples() {
        let mc = McSpec::new(1003, 0, 7).unwrap();
        let total: u64 = (0..7).map(|i| mc.chunk_len(i)).sum();
        assert_eq!(total, 1003);
    }

    #[test]
    fn single_sample_has_zero_error() {
        let p = ModelParams::new(0.5, 1.0, 0.01).unwrap();
        let mc = McSpec::new(1, 3, 1).unwrap();
        let est = estimate_p12_mc(Setting::new(0.0, 0.0), &p, &mc);
        assert_eq!(est.estimate.std_error, 0.0);
        assert!(est.low_hit_count());
    }

    #[test]
    fn tiny_run_reports_zero_with_low_hit_flag() {
        let p = ModelParams::new(0.5, 1.0, 1e-4).unwrap();
        let mc = McSpec::new(1000, 3, 4).unwrap();
        let est = estimate_p12_mc(Setting::new(0.0, 0.0), &p, &mc);
        assert_eq!(est.hits, 0);
        assert_eq!(est.estimate.value, 0.0);
        assert_eq!(est.estimate.std_error, 0.0);
        assert!(est.low_hit_count());
    }
}
