//! Monte Carlo estimates of `E[(scale·S_k + shift)_{n,λ}]`, for comparing the
//! exact moment pipeline against sampled data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Geometric, Poisson};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{ModelKind, MomentModel};
use crate::ratcore::{rational_str, to_f64, Rational};

/// Samples per independently seeded stream. Fixed so results do not depend
/// on the thread count.
const BATCH: usize = 8192;

#[derive(Debug, Clone, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
    #[serde(with = "rational_str")]
    pub target: Rational,
}

impl McEstimate {
    /// `|mean - target|` in units of the standard error; infinite when the
    /// error is zero and the mean misses the target.
    pub fn z_score(&self) -> f64 {
        let gap = (self.mean - to_f64(&self.target)).abs();
        if self.std_error > 0.0 {
            gap / self.std_error
        } else if gap <= 1e-9 * to_f64(&self.target).abs().max(1.0) {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn within(&self, sigmas: f64) -> bool {
        self.z_score() <= sigmas
    }
}

enum Sampler {
    Constant(f64),
    Bernoulli(f64),
    Binomial(Binomial),
    Uniform(u32),
    Poisson(Poisson<f64>),
    Geometric(Geometric),
}

impl Sampler {
    fn new(kind: &ModelKind) -> Result<Self> {
        let invalid = |e: String| Error::InvalidModel(e);
        Ok(match kind {
            ModelKind::PointMass { value } => Sampler::Constant(to_f64(value)),
            ModelKind::Bernoulli { p } => Sampler::Bernoulli(to_f64(p)),
            ModelKind::Binomial { trials, p } => Sampler::Binomial(
                Binomial::new(*trials as u64, to_f64(p)).map_err(|e| invalid(e.to_string()))?,
            ),
            ModelKind::DiscreteUniform { max } => Sampler::Uniform(*max),
            ModelKind::Poisson { rate } => {
                let rate = to_f64(rate);
                if rate == 0.0 {
                    Sampler::Constant(0.0)
                } else {
                    Sampler::Poisson(Poisson::new(rate).map_err(|e| invalid(e.to_string()))?)
                }
            }
            ModelKind::Geometric { p } => {
                Sampler::Geometric(Geometric::new(to_f64(p)).map_err(|e| invalid(e.to_string()))?)
            }
            ModelKind::Custom { .. } => return Err(Error::UnsupportedSampler("custom".into())),
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            Sampler::Constant(c) => *c,
            Sampler::Bernoulli(p) => f64::from(u8::from(rng.random::<f64>() < *p)),
            Sampler::Binomial(d) => d.sample(rng) as f64,
            Sampler::Uniform(max) => rng.random_range(0..=*max) as f64,
            Sampler::Poisson(d) => d.sample(rng),
            Sampler::Geometric(d) => d.sample(rng) as f64,
        }
    }
}

/// `count` i.i.d. draws of `Y`, reproducible from `seed`.
pub fn sample_y(model: &MomentModel, seed: u64, count: usize) -> Result<Vec<f64>> {
    let sampler = Sampler::new(model.kind())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| sampler.draw(&mut rng)).collect())
}

fn degen_falling_f64(x: f64, n: usize, lambda: f64) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (x - i as f64 * lambda))
}

/// Running count, mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.count += 1;
        let delta = v - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (v - self.mean);
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
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.count as f64 * other.count as f64) / count as f64;
        Moments { count, mean, m2 }
    }
}

/// Averages `(scale·(y_1+...+y_k) + shift)_{n,λ}` over `samples` draws of the
/// `k`-tuple. Batches use separate ChaCha streams of one seed, so the result
/// is bit-identical for any degree of parallelism.
#[allow(clippy::too_many_arguments)]
pub fn estimate_sum_degen_moment(
    model: &MomentModel,
    k: usize,
    scale: u32,
    shift: u32,
    n: usize,
    lambda: &Rational,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {samples}")));
    }
    let sampler = Sampler::new(model.kind())?;
    let target = model.sum_degen_moment(k, scale, shift, n, lambda)?;
    let (scale, shift, lam) = (scale as f64, shift as f64, to_f64(lambda));
    let batches = samples.div_ceil(BATCH);
    let parts: Vec<Moments> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let len = BATCH.min(samples - b * BATCH);
            let mut acc = Moments::default();
            for _ in 0..len {
                let s: f64 = (0..k).map(|_| sampler.draw(&mut rng)).sum();
                acc.push(degen_falling_f64(scale * s + shift, n, lam));
            }
            acc
        })
        .collect();
    let total = parts.into_iter().fold(Moments::default(), Moments::merge);
    let variance = total.m2 / (total.count - 1) as f64;
    Ok(McEstimate {
        mean: total.mean,
        std_error: (variance.max(0.0) / total.count as f64).sqrt(),
        samples: total.count,
        target,
    })
}
