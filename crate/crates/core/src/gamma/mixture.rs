use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative tolerance under which two variances are treated as equal when merging.
const MERGE_RTOL: f64 = 1e-12;
/// Terms with `|w| < PRUNE_RTOL · Σ|w|` are dropped by [`GaussianMixture::compact`].
const PRUNE_RTOL: f64 = 1e-15;

/// Density of the centered isotropic Gaussian on `R^d` with covariance `t·I` at radius `r`.
pub fn gaussian_density(d: usize, t: f64, r: f64) -> f64 {
    (2.0 * PI * t).powf(-(d as f64) / 2.0) * (-r * r / (2.0 * t)).exp()
}

/// `ln φ_t(r)` on `R^d`.
pub fn ln_gaussian_density(d: usize, t: f64, r: f64) -> f64 {
    -(d as f64) / 2.0 * (2.0 * PI * t).ln() - r * r / (2.0 * t)
}

/// One mixture component `w · φ_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub weight: f64,
    pub variance: f64,
}

/// Signed finite combination `Σ_j w_j φ_{t_j}` of centered isotropic Gaussians on `R^d`.
///
/// Closed under addition, scaling and convolution (`φ_s * φ_t = φ_{s+t}`).
/// Terms are kept sorted by variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture {
    dim: usize,
    terms: Vec<Term>,
}

impl GaussianMixture {
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if let Some(bad) = terms
            .iter()
            .find(|t| !(t.variance > 0.0 && t.variance.is_finite() && t.weight.is_finite()))
        {
            return Err(Error::InvalidParameter(format!(
                "mixture term needs finite weight and positive finite variance, got {bad:?}"
            )));
        }
        let mut mix = GaussianMixture { dim, terms };
        mix.sort_and_merge();
        Ok(mix)
    }

    pub fn zero(dim: usize) -> Self {
        GaussianMixture { dim, terms: Vec::new() }
    }

    /// `w · φ_t`.
    pub fn single(dim: usize, weight: f64, variance: f64) -> Result<Self> {
        Self::new(dim, vec![Term { weight, variance }])
    }

    pub fn gaussian(dim: usize, variance: f64) -> Result<Self> {
        Self::single(dim, 1.0, variance)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `∫ mixture = Σ w_j`.
    pub fn mass(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    /// `Σ |w_j|`, the total variation of the mixture's weights.
    pub fn abs_mass(&self) -> f64 {
        self.terms.iter().map(|t| t.weight.abs()).sum()
    }

    /// `∫ |x|^{2k} mixture(x) dx` for `k ∈ {0, 1, 2}`.
    pub fn moment(&self, k: u32) -> f64 {
        let d = self.dim as f64;
        self.terms
            .iter()
            .map(|t| t.weight * gaussian_moment(d, t.variance, k))
            .sum()
    }

    /// The coefficient `b̄` in `∫ x xᵀ mixture(x) dx = b̄ I_d`, i.e. `Σ w_j t_j`.
    pub fn covariance_coefficient(&self) -> f64 {
        self.terms.iter().map(|t| t.weight * t.variance).sum()
    }

    pub fn min_variance(&self) -> Option<f64> {
        self.terms.first().map(|t| t.variance)
    }

    pub fn max_variance(&self) -> Option<f64> {
        self.terms.last().map(|t| t.variance)
    }

    pub fn has_nonnegative_weights(&self) -> bool {
        self.terms.iter().all(|t| t.weight >= 0.0)
    }

    /// Value at any point of radius `r`.
    pub fn eval(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.weight * gaussian_density(self.dim, t.variance, r))
            .sum()
    }

    /// `ln` of the value for a mixture with nonnegative weights, computed without
    /// underflow far in the tails. `-∞` for the zero mixture.
    pub fn ln_eval(&self, r: f64) -> f64 {
        debug_assert!(self.has_nonnegative_weights());
        let logs = self
            .terms
            .iter()
            .filter(|t| t.weight > 0.0)
            .map(|t| t.weight.ln() + ln_gaussian_density(self.dim, t.variance, r));
        let max = logs.clone().fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return max;
        }
        max + logs.map(|l| (l - max).exp()).sum::<f64>().ln()
    }

    /// `value(r) · exp(−ln_ref)`, for comparing signed mixtures against a
    /// reference whose logarithm is known, without underflow.
    pub fn eval_relative(&self, r: f64, ln_ref: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.weight * (ln_gaussian_density(self.dim, t.variance, r) - ln_ref).exp())
            .sum()
    }

    /// Radial Fourier profile `Σ w_j exp(−t_j k²/2)`.
    pub fn hat(&self, k: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.weight * (-0.5 * t.variance * k * k).exp())
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        GaussianMixture {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|t| Term { weight: t.weight * factor, variance: t.variance })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        let mut out = GaussianMixture { dim: self.dim, terms };
        out.sort_and_merge();
        out
    }

    /// Adds `factor · other` in place.
    pub fn add_scaled(&mut self, other: &Self, factor: f64) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.terms.extend(
            other
                .terms
                .iter()
                .map(|t| Term { weight: t.weight * factor, variance: t.variance }),
        );
        self.sort_and_merge();
    }

    /// Convolution: pairwise terms `(w w′, t + t′)`, merged.
    pub fn convolve(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(Term { weight: a.weight * b.weight, variance: a.variance + b.variance });
            }
        }
        let mut out = GaussianMixture { dim: self.dim, terms };
        out.sort_and_merge();
        out
    }

    /// Convolution with `φ_t`; `t = 0` is the point mass and returns a copy.
    pub fn convolve_gaussian(&self, t: f64) -> Self {
        debug_assert!(t >= 0.0);
        GaussianMixture {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|x| Term { weight: x.weight, variance: x.variance + t })
                .collect(),
        }
    }

    /// Merges equal variances and prunes negligible weights.
    pub fn compact(&mut self) {
        self.sort_and_merge();
        let scale = self.abs_mass();
        if scale > 0.0 {
            self.terms.retain(|t| t.weight.abs() >= PRUNE_RTOL * scale);
        }
    }

    fn sort_and_merge(&mut self) {
        self.terms
            .sort_by(|a, b| a.variance.partial_cmp(&b.variance).expect("finite variances"));
        let mut merged: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if (t.variance - last.variance).abs() <= MERGE_RTOL * t.variance => {
                    last.weight += t.weight;
                }
                _ => merged.push(t),
            }
        }
        self.terms = merged;
    }
}

/// `∫ |y|^{2k} φ_t(y) dy` on `R^d`: `1`, `d t`, `d(d+2) t²`.
pub fn gaussian_moment(d: f64, t: f64, k: u32) -> f64 {
    match k {
        0 => 1.0,
        1 => d * t,
        2 => d * (d + 2.0) * t * t,
        _ => panic!("moment order {k} not supported"),
    }
}
