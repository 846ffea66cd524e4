use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::gamma::{GaussianMixture, MajorantFamily};
use crate::sequence::BScalars;
use crate::spectral::{mixture_hat, RadialFn, RadialGrid};
use crate::{Error, Result};

/// Kernel sequence `B_1, B_2, …` entering the convolution recursion.
#[derive(Debug, Clone, PartialEq)]
pub enum BFamilySpec {
    /// `B_n = scale · Γ_n` for a majorant family; `|scale| ≤ 1` keeps it dominated.
    Dominated { majorant: MajorantFamily, scale: f64 },
    /// Explicit mixtures `B_1..B_N`, zero beyond `N`.
    Mixtures { dim: usize, mixtures: Vec<GaussianMixture>, majorant: Option<MajorantFamily> },
    /// Frequency profiles with their masses and second-moment coefficients,
    /// zero beyond the tabulated length. No real-space form.
    Tabulated { dim: usize, hats: Vec<RadialFn>, b: Vec<f64>, b_bar: Vec<f64> },
}

/// Serializable description of a [`BFamilySpec`] for run manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum BFamilySummary {
    Dominated { majorant: MajorantFamily, scale: f64 },
    Mixtures { terms: usize },
    Tabulated { terms: usize },
}

impl BFamilySpec {
    pub fn dominated(majorant: MajorantFamily, scale: f64) -> Result<Self> {
        if !scale.is_finite() {
            return Err(Error::InvalidParameter(format!("scale must be finite, got {scale}")));
        }
        Ok(BFamilySpec::Dominated { majorant, scale })
    }

    /// `B_n = −Γ_n` with `Γ_n = n^{−a} φ_{n/2}`, the repulsive power-law preset.
    pub fn power_law_preset(a: f64, dim: usize) -> Result<Self> {
        Self::dominated(MajorantFamily::power_law(a, dim)?, -1.0)
    }

    /// `B_n = −Γ_n` for the SAW majorant with prefactor `k`.
    pub fn saw_preset(k: f64, dim: usize) -> Result<Self> {
        Self::dominated(MajorantFamily::saw(k, dim)?, -1.0)
    }

    pub fn mixtures(mixtures: Vec<GaussianMixture>, majorant: Option<MajorantFamily>) -> Result<Self> {
        let dim = mixtures.first().map(|m| m.dim()).ok_or_else(|| {
            Error::InvalidParameter("at least one mixture is required".into())
        })?;
        if mixtures.iter().any(|m| m.dim() != dim) || majorant.is_some_and(|g| g.dim != dim) {
            return Err(Error::InvalidParameter("mixtures must share one dimension".into()));
        }
        Ok(BFamilySpec::Mixtures { dim, mixtures, majorant })
    }

    pub fn tabulated(dim: usize, hats: Vec<RadialFn>, b: Vec<f64>, b_bar: Vec<f64>) -> Result<Self> {
        if hats.is_empty() || hats.len() != b.len() || b.len() != b_bar.len() {
            return Err(Error::InvalidParameter("tabulated family needs equal, non-zero lengths".into()));
        }
        if hats.windows(2).any(|w| !w[0].same_grid(&w[1])) {
            return Err(Error::InvalidParameter("tabulated profiles must share one grid".into()));
        }
        Ok(BFamilySpec::Tabulated { dim, hats, b, b_bar })
    }

    pub fn dim(&self) -> usize {
        match self {
            BFamilySpec::Dominated { majorant, .. } => majorant.dim,
            BFamilySpec::Mixtures { dim, .. } | BFamilySpec::Tabulated { dim, .. } => *dim,
        }
    }

    /// Number of non-zero kernels, `None` when infinite.
    pub fn support(&self) -> Option<usize> {
        match self {
            BFamilySpec::Dominated { .. } => None,
            BFamilySpec::Mixtures { mixtures, .. } => Some(mixtures.len()),
            BFamilySpec::Tabulated { b, .. } => Some(b.len()),
        }
    }

    pub fn majorant(&self) -> Option<MajorantFamily> {
        match self {
            BFamilySpec::Dominated { majorant, .. } => Some(*majorant),
            BFamilySpec::Mixtures { majorant, .. } => *majorant,
            BFamilySpec::Tabulated { .. } => None,
        }
    }

    pub fn has_mixtures(&self) -> bool {
        !matches!(self, BFamilySpec::Tabulated { .. })
    }

    /// `B_n` in real space, `n ≥ 1`; `None` for tabulated families.
    pub fn mixture(&self, n: usize) -> Option<GaussianMixture> {
        assert!(n >= 1);
        match self {
            BFamilySpec::Dominated { majorant, scale } => Some(majorant.gamma(n).scaled(*scale)),
            BFamilySpec::Mixtures { dim, mixtures, .. } => {
                Some(mixtures.get(n - 1).cloned().unwrap_or_else(|| GaussianMixture::zero(*dim)))
            }
            BFamilySpec::Tabulated { .. } => None,
        }
    }

    /// `B̂_n` on `grid`. Tabulated profiles must live on that grid.
    pub fn hat(&self, n: usize, grid: &Arc<RadialGrid>) -> Result<RadialFn> {
        match self {
            BFamilySpec::Tabulated { hats, .. } => {
                let zero = RadialFn::constant(grid.clone(), 0.0);
                let h = hats.get(n - 1).unwrap_or(&zero);
                if !h.same_grid(&zero) {
                    return Err(Error::InvalidParameter("tabulated profile grid differs from solver grid".into()));
                }
                Ok(h.clone())
            }
            _ => Ok(mixture_hat(&self.mixture(n).expect("mixture family"), grid)),
        }
    }

    /// Smallest variance among the real-space kernels up to `n_max`.
    pub fn min_variance(&self, n_max: usize) -> Option<f64> {
        (1..=n_max)
            .filter_map(|n| self.mixture(n).and_then(|m| m.min_variance()))
            .reduce(f64::min)
    }

    /// `(b_n, b̄_n)`, `n ≥ 1`.
    pub fn moments(&self, n: usize) -> (f64, f64) {
        match self {
            BFamilySpec::Dominated { majorant, scale } => (
                scale * majorant.gamma_moment(n, 0),
                scale * majorant.gamma_moment(n, 1) / majorant.dim as f64,
            ),
            BFamilySpec::Mixtures { mixtures, .. } => mixtures
                .get(n - 1)
                .map(|m| (m.mass(), m.covariance_coefficient()))
                .unwrap_or((0.0, 0.0)),
            BFamilySpec::Tabulated { b, b_bar, .. } => {
                (b.get(n - 1).copied().unwrap_or(0.0), b_bar.get(n - 1).copied().unwrap_or(0.0))
            }
        }
    }

    pub fn scalars(&self, lambda: f64, n_max: usize) -> Result<BScalars> {
        let (b, b_bar) = match self {
            BFamilySpec::Dominated { majorant, scale } => {
                let table = majorant.moment_table(n_max);
                let d = majorant.dim as f64;
                (
                    (1..=n_max).map(|n| scale * table.get(n, 0)).collect(),
                    (1..=n_max).map(|n| scale * table.get(n, 1) / d).collect(),
                )
            }
            _ => (1..=n_max).map(|n| self.moments(n)).unzip(),
        };
        BScalars::new(lambda, b, b_bar)
    }

    pub fn summary(&self) -> BFamilySummary {
        match self {
            BFamilySpec::Dominated { majorant, scale } => {
                BFamilySummary::Dominated { majorant: *majorant, scale: *scale }
            }
            BFamilySpec::Mixtures { mixtures, .. } => BFamilySummary::Mixtures { terms: mixtures.len() },
            BFamilySpec::Tabulated { b, .. } => BFamilySummary::Tabulated { terms: b.len() },
        }
    }
}
