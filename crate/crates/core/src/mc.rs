//! Monte Carlo plumbing: counter-based random streams and mergeable moment
//! accumulators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::gamma::GaussianMixture;

/// Mean, standard error and sample count of a Monte Carlo observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_samples: u64,
}

impl McEstimate {
    pub fn exact(value: f64, n_samples: u64) -> Self {
        McEstimate { mean: value, stderr: 0.0, n_samples }
    }

    /// `(self − reference) / stderr`; zero when both the difference and the error vanish.
    pub fn z_score(&self, reference: f64) -> f64 {
        let diff = self.mean - reference;
        if self.stderr == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                diff.signum() * f64::INFINITY
            }
        } else {
            diff / self.stderr
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        McEstimate { mean: self.mean * factor, stderr: self.stderr * factor.abs(), n_samples: self.n_samples }
    }
}

/// Welford accumulator, merged with the pairwise update so that block-wise
/// accumulation in a fixed order is reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Moments) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * self.n as f64 * other.n as f64 / n as f64;
        self.n = n;
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub fn estimate(&self) -> McEstimate {
        let stderr = if self.n < 2 { 0.0 } else { (self.variance() / self.n as f64).sqrt() };
        McEstimate { mean: self.mean, stderr, n_samples: self.n }
    }
}

/// Sums of `x`, `y`, `x²`, `y²`, `xy` for ratio estimators.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PairSums {
    pub n: u64,
    pub sx: f64,
    pub sy: f64,
    pub sxx: f64,
    pub syy: f64,
    pub sxy: f64,
}

impl PairSums {
    pub fn push(&mut self, x: f64, y: f64) {
        self.n += 1;
        self.sx += x;
        self.sy += y;
        self.sxx += x * x;
        self.syy += y * y;
        self.sxy += x * y;
    }

    pub fn merge(&mut self, o: &PairSums) {
        self.n += o.n;
        self.sx += o.sx;
        self.sy += o.sy;
        self.sxx += o.sxx;
        self.syy += o.syy;
        self.sxy += o.sxy;
    }

    /// `E[x] / E[y]` with a delta-method standard error.
    pub fn ratio(&self) -> McEstimate {
        let n = self.n as f64;
        if self.n < 2 || self.sy == 0.0 {
            return McEstimate { mean: f64::NAN, stderr: f64::NAN, n_samples: self.n };
        }
        let (mx, my) = (self.sx / n, self.sy / n);
        let r = mx / my;
        let vxx = (self.sxx / n - mx * mx) * n / (n - 1.0);
        let vyy = (self.syy / n - my * my) * n / (n - 1.0);
        let vxy = (self.sxy / n - mx * my) * n / (n - 1.0);
        let var = (vxx - 2.0 * r * vxy + r * r * vyy) / (my * my * n);
        McEstimate { mean: r, stderr: var.max(0.0).sqrt(), n_samples: self.n }
    }
}

/// Independent stream for sample `index` under `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn fill_standard_normal(rng: &mut impl Rng, out: &mut [f64]) {
    for v in out {
        *v = rng.sample(StandardNormal);
    }
}

/// Draws one point from a mixture with nonnegative weights, normalized to a
/// probability distribution.
pub fn sample_mixture(rng: &mut impl Rng, mix: &GaussianMixture, out: &mut [f64]) {
    let total = mix.mass();
    let mut u: f64 = rng.random::<f64>() * total;
    let terms = mix.terms();
    let mut variance = terms.last().expect("non-empty mixture").variance;
    for t in terms {
        if u < t.weight {
            variance = t.variance;
            break;
        }
        u -= t.weight;
    }
    let sd = variance.sqrt();
    for v in out {
        *v = sd * rng.sample::<f64, _>(StandardNormal);
    }
}
