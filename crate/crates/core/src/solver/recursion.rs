use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::family::BFamilySpec;
use crate::exec::Exec;
use crate::gamma::{geometric_grid, GaussianMixture, PsiScale, ZetaTable};
use crate::sequence::{self, SequenceSolution};
use crate::spectral::{check_dimension, RadialFn, RadialGrid};
use crate::{Error, Result};

pub const DEFAULT_EPSILON: f64 = 0.01;
/// Length of the scalar sequence used for `μ`, `α`, `δ` when the kernel
/// sequence has infinite support.
pub const DEFAULT_SEQUENCE_HORIZON: usize = 8192;
/// Lower limit on `δ(1+ε)` for SAW-type kernels.
pub const SAW_DELTA_FLOOR: f64 = 0.8;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub d: usize,
    pub lambda: f64,
    pub epsilon: f64,
    pub n_max: usize,
    pub family: BFamilySpec,
    /// Frequency grid; chosen from the kernels' smallest variance when `None`.
    pub grid: Option<Arc<RadialGrid>>,
    /// Radii for real-space profiles; the default geometric grid when `None`.
    pub radius_grid: Option<Vec<f64>>,
    /// Scalar-sequence length for the normalization; defaults to
    /// [`DEFAULT_SEQUENCE_HORIZON`] for infinite support.
    pub sequence_horizon: Option<usize>,
    pub exec: Exec,
}

impl SolverConfig {
    pub fn new(family: BFamilySpec, lambda: f64, n_max: usize) -> Self {
        SolverConfig {
            d: family.dim(),
            lambda,
            epsilon: DEFAULT_EPSILON,
            n_max,
            family,
            grid: None,
            radius_grid: None,
            sequence_horizon: None,
            exec: Exec::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_dimension(self.d)?;
        if self.family.dim() != self.d {
            return Err(Error::InvalidParameter(format!(
                "family dimension {} differs from d = {}",
                self.family.dim(),
                self.d
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 0.01) {
            return Err(Error::InvalidParameter(format!("ε must lie in (0, 0.01], got {}", self.epsilon)));
        }
        if self.n_max == 0 {
            return Err(Error::InvalidParameter("n_max must be >= 1".into()));
        }
        if let Some(r) = &self.radius_grid {
            if r.is_empty() || r.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
                return Err(Error::InvalidParameter("radius grid must be non-empty and >= 0".into()));
            }
        }
        Ok(())
    }

    fn horizon(&self) -> usize {
        let base = match self.family.support() {
            None => self.sequence_horizon.unwrap_or(DEFAULT_SEQUENCE_HORIZON),
            Some(len) => self.sequence_horizon.unwrap_or(len).max(len),
        };
        base.max(self.n_max)
    }
}

/// Result of [`run_recursion`].
#[derive(Debug, Clone)]
pub struct SolverRun {
    pub config: SolverConfig,
    /// Normalization computed on the extended horizon.
    pub solution: SequenceSolution,
    /// `Ĉ_0, …, Ĉ_{n_max}`.
    pub c_hat: Vec<RadialFn>,
    /// `C_0` (as the empty mixture standing for `δ_0`), `C_1, …` in real space,
    /// when every `B_m` is a mixture.
    pub c_mix: Option<Vec<GaussianMixture>>,
    pub grid: Arc<RadialGrid>,
    pub radii: Vec<f64>,
    /// `ζ̄` and friends for the declared majorant.
    pub zeta: Option<ZetaTable>,
    /// `δ(1+ε) ≥ 4/5`.
    pub restriction_ok: bool,
}

impl SolverRun {
    pub fn c(&self, n: usize) -> f64 {
        self.solution.c[n]
    }

    pub fn delta(&self) -> f64 {
        self.solution.delta
    }

    pub fn psi_scale(&self) -> PsiScale {
        PsiScale::new(self.delta(), self.config.epsilon).expect("δ > 0 after a successful solve")
    }

    pub fn d(&self) -> usize {
        self.config.d
    }

    pub fn n_max(&self) -> usize {
        self.config.n_max
    }
}

/// 64 geometric radii in `[10⁻², 8 √(n_max δ (1+ε))]`.
pub fn default_solver_radii(n_max: usize, delta: f64, epsilon: f64) -> Vec<f64> {
    geometric_grid(1e-2, 8.0 * (n_max as f64 * delta * (1.0 + epsilon)).sqrt(), 64)
}

/// `Ĉ_n = Ĉ_{n−1} e^{−k²/2} + λ Σ_{m=1}^{n} c_m B̂_m Ĉ_{n−m}` with `c_m` from the
/// scalar recursion, plus the same recursion on mixtures where available.
pub fn run_recursion(config: SolverConfig) -> Result<SolverRun> {
    config.validate()?;
    let n_max = config.n_max;
    let horizon = config.horizon();
    let scalars = config.family.scalars(config.lambda, horizon)?;
    let solution = sequence::solve(&scalars)?;
    let c = &solution.c;

    let grid = match &config.grid {
        Some(g) => g.clone(),
        None => match config.family.min_variance(n_max) {
            Some(t) => RadialGrid::for_min_variance(t.min(1.0))?.shared(),
            None => RadialGrid::default().shared(),
        },
    };
    let b_hat: Vec<RadialFn> = (1..=n_max)
        .map(|m| config.family.hat(m, &grid))
        .collect::<Result<_>>()?;
    if config.family.has_mixtures() {
        for h in &b_hat {
            h.check_decay()?;
        }
    }

    let nodes = grid.nodes();
    let lambda = config.lambda;
    let per_node: Vec<Vec<f64>> = config.exec.map(nodes.len(), |i| {
        let k = nodes[i];
        let step = (-0.5 * k * k).exp();
        let mut col = vec![0.0; n_max + 1];
        col[0] = 1.0;
        for n in 1..=n_max {
            let mut acc = 0.0;
            for m in 1..=n {
                acc += c[m] * b_hat[m - 1].values()[i] * col[n - m];
            }
            col[n] = col[n - 1] * step + lambda * acc;
        }
        col
    });
    let c_hat: Vec<RadialFn> = (0..=n_max)
        .map(|n| RadialFn::new(grid.clone(), per_node.iter().map(|col| col[n]).collect()))
        .collect::<Result<_>>()?;

    let c_mix = if config.family.has_mixtures() {
        let d = config.d;
        let b: Vec<GaussianMixture> = (1..=n_max).map(|m| config.family.mixture(m).unwrap()).collect();
        let mut mixes: Vec<GaussianMixture> = vec![GaussianMixture::zero(d)];
        for n in 1..=n_max {
            let mut next = if n == 1 {
                GaussianMixture::gaussian(d, 1.0)?
            } else {
                mixes[n - 1].convolve_gaussian(1.0)
            };
            for m in 1..=n {
                let term = if m == n { b[m - 1].clone() } else { b[m - 1].convolve(&mixes[n - m]) };
                next.add_scaled(&term, lambda * c[m]);
            }
            next.compact();
            mixes.push(next);
        }
        Some(mixes)
    } else {
        None
    };

    let zeta = match config.family.majorant() {
        Some(g) => Some(ZetaTable::new(&g, n_max.max(2))?),
        None => None,
    };
    let radii = config
        .radius_grid
        .clone()
        .unwrap_or_else(|| default_solver_radii(n_max, solution.delta, config.epsilon));
    let restriction_ok = solution.delta * (1.0 + config.epsilon) >= SAW_DELTA_FLOOR;
    Ok(SolverRun { config, solution, c_hat, c_mix, grid, radii, zeta, restriction_ok })
}

/// Largest `|Ĉ_n − [Ĉ_{n−1}e^{−k²/2} + λ Σ c_m B̂_m Ĉ_{n−m}]| / max(1, |Ĉ_n|)`.
pub fn frequency_residual(run: &SolverRun) -> Result<f64> {
    let grid = &run.grid;
    let n_max = run.n_max();
    let b_hat: Vec<RadialFn> = (1..=n_max)
        .map(|m| run.config.family.hat(m, grid))
        .collect::<Result<_>>()?;
    let lambda = run.config.lambda;
    let mut worst = 0.0f64;
    for (i, &k) in grid.nodes().iter().enumerate() {
        let step = (-0.5 * k * k).exp();
        for n in 1..=n_max {
            let conv: f64 = (1..=n)
                .map(|m| run.c(m) * b_hat[m - 1].values()[i] * run.c_hat[n - m].values()[i])
                .sum();
            let rhs = run.c_hat[n - 1].values()[i] * step + lambda * conv;
            let v = run.c_hat[n].values()[i];
            worst = worst.max((v - rhs).abs() / v.abs().max(1.0));
        }
    }
    Ok(worst)
}

/// Summary written next to profile tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub mu: f64,
    pub alpha: f64,
    pub delta: f64,
    pub smallness_ok: bool,
    pub restriction_ok: bool,
    pub ratios: Vec<(usize, f64)>,
}

impl RunSummary {
    pub fn new(run: &SolverRun, n_list: &[usize]) -> Result<Self> {
        let s = &run.solution;
        Ok(RunSummary {
            mu: s.mu,
            alpha: s.alpha,
            delta: s.delta,
            smallness_ok: s.smallness_ok,
            restriction_ok: run.restriction_ok,
            ratios: super::analysis::ratio_report(run, n_list)?,
        })
    }
}
