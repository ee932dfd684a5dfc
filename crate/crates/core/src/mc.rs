//! Seeded Monte Carlo estimates of `p`, `m` and upper tails.
//!
//! Samples are drawn in fixed-size chunks. Chunk `j` uses a ChaCha8 stream
//! seeded with `seed` and stream id `j`, and chunk statistics are merged in
//! chunk order, so reports are identical for a given seed regardless of
//! thread count or platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::TabulatedFunction;
use crate::space::ProductSpace;
use crate::subset::SubsetY;

const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub epsilon: f64,
    /// Fraction of samples with `f(X) - center ≥ ε`.
    pub tail_hat: f64,
    pub std_err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MCReport {
    pub seed: u64,
    pub samples: u64,
    pub center: f64,
    pub in_y: u64,
    pub p_hat: f64,
    pub p_std_err: Option<f64>,
    /// Mean of `f` over the samples that fell in Y; absent when none did.
    pub m_hat: Option<f64>,
    pub m_std_err: Option<f64>,
    pub tails: Vec<TailEstimate>,
}

/// Running count, mean and sum of squared deviations (Welford).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let weight = other.count as f64 / count as f64;
        Moments {
            count,
            mean: self.mean + delta * weight,
            m2: self.m2 + other.m2 + delta * delta * self.count as f64 * weight,
        }
    }

    fn std_err(&self) -> Option<f64> {
        (self.count >= 2).then(|| (self.m2 / (self.count - 1) as f64 / self.count as f64).sqrt())
    }
}

#[derive(Debug, Clone, Default)]
struct ChunkStats {
    in_y: Moments,
    tail_hits: Vec<u64>,
}

/// Inverse-CDF sampler for one coordinate.
struct CoordinateSampler {
    cdf: Vec<f64>,
    last: usize,
}

impl CoordinateSampler {
    fn new(law: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf = law
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let last = law.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        Self { cdf, last }
    }

    fn draw(&self, u: f64) -> usize {
        self.cdf.partition_point(|&c| c <= u).min(self.last)
    }
}

fn bernoulli_std_err(hits: u64, samples: u64) -> Option<f64> {
    (samples >= 2).then(|| {
        let q = hits as f64 / samples as f64;
        (q * (1.0 - q) / (samples - 1) as f64).sqrt()
    })
}

/// Plain Monte Carlo from the product law.
pub fn mc_estimate(
    space: &ProductSpace,
    f: &TabulatedFunction,
    y: &SubsetY,
    center: f64,
    eps_grid: &[f64],
    seed: u64,
    samples: u64,
) -> Result<MCReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    f.check(space)?;
    y.check(space)?;
    if let crate::function::FunctionSource::Table(_) = f.source {
        space.enumerable_count()?;
    }

    let samplers: Vec<CoordinateSampler> = space
        .probs()
        .iter()
        .map(|law| CoordinateSampler::new(law))
        .collect();
    let chunks = samples.div_ceil(CHUNK);

    let per_chunk: Vec<ChunkStats> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let len = CHUNK.min(samples - chunk * CHUNK);
            let mut coords = vec![0usize; space.n()];
            let mut stats = ChunkStats {
                in_y: Moments::default(),
                tail_hits: vec![0; eps_grid.len()],
            };
            for _ in 0..len {
                for (slot, sampler) in coords.iter_mut().zip(&samplers) {
                    *slot = sampler.draw(rng.gen::<f64>());
                }
                let value = f.eval_coords(space, &coords);
                if y.contains(space, &coords) {
                    stats.in_y.push(value);
                }
                for (hits, &eps) in stats.tail_hits.iter_mut().zip(eps_grid) {
                    if value - center >= eps {
                        *hits += 1;
                    }
                }
            }
            stats
        })
        .collect();

    let mut in_y = Moments::default();
    let mut tail_hits = vec![0u64; eps_grid.len()];
    for stats in per_chunk {
        in_y = in_y.merge(stats.in_y);
        for (total, hits) in tail_hits.iter_mut().zip(stats.tail_hits) {
            *total += hits;
        }
    }

    let out = samples - in_y.count;
    let tails = eps_grid
        .iter()
        .zip(tail_hits)
        .map(|(&epsilon, hits)| TailEstimate {
            epsilon,
            tail_hat: hits as f64 / samples as f64,
            std_err: bernoulli_std_err(hits, samples),
        })
        .collect();

    Ok(MCReport {
        seed,
        samples,
        center,
        in_y: in_y.count,
        p_hat: out as f64 / samples as f64,
        p_std_err: bernoulli_std_err(out, samples),
        m_hat: (in_y.count > 0).then_some(in_y.mean),
        m_std_err: in_y.std_err(),
        tails,
    })
}
