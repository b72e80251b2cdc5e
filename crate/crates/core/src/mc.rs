//! Chunked, seeded Monte Carlo.
//!
//! Chunk `c` draws from `ChaCha8Rng::seed_from_u64(seed)` on stream `c`, and
//! chunk results are folded in chunk order, so an estimate depends only on
//! `(seed, samples)` and never on the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Samples per chunk.
pub const CHUNK: u64 = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self { samples, seed }
    }
}

/// Sample mean and standard error of each coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct Moments {
    pub mean: Vec<f64>,
    pub std_err: Vec<f64>,
    pub samples: u64,
}

/// RNG for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Estimates `E[f]` for a vector-valued `f` of dimension `dim`.
///
/// `f` writes one draw into the zeroed output slice.
pub fn estimate<F>(cfg: McConfig, dim: usize, f: F) -> Moments
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) + Sync,
{
    let chunks = cfg.samples.div_ceil(CHUNK);
    let partials: Vec<(Vec<f64>, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(cfg.seed, c);
            let n = CHUNK.min(cfg.samples - c * CHUNK);
            let mut sum = vec![0.0; dim];
            let mut sq = vec![0.0; dim];
            let mut draw = vec![0.0; dim];
            for _ in 0..n {
                draw.iter_mut().for_each(|x| *x = 0.0);
                f(&mut rng, &mut draw);
                for d in 0..dim {
                    sum[d] += draw[d];
                    sq[d] += draw[d] * draw[d];
                }
            }
            (sum, sq)
        })
        .collect();
    let mut sum = vec![0.0; dim];
    let mut sq = vec![0.0; dim];
    for (s, q) in &partials {
        for d in 0..dim {
            sum[d] += s[d];
            sq[d] += q[d];
        }
    }
    let n = cfg.samples.max(1) as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let std_err = mean
        .iter()
        .zip(&sq)
        .map(|(m, q)| {
            let var = if cfg.samples > 1 {
                ((q - n * m * m) / (n - 1.0)).max(0.0)
            } else {
                0.0
            };
            (var / n).sqrt()
        })
        .collect();
    Moments {
        mean,
        std_err,
        samples: cfg.samples,
    }
}

/// Draws an index with probability proportional to `weights`.
#[derive(Clone, Debug)]
pub struct Categorical {
    cumulative: Vec<f64>,
}

impl Categorical {
    pub fn new(weights: impl IntoIterator<Item = f64>) -> Self {
        let mut acc = 0.0;
        let cumulative = weights
            .into_iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Self { cumulative }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty categorical");
        let u = rng.random::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1)
    }
}
