use std::sync::Arc;

use super::bessel::{check_dimension, omega_unchecked};
use super::grid::{RadialGrid, DECAY_TOLERANCE};
use crate::exec::Exec;
use crate::gamma::GaussianMixture;
use crate::{Error, Result};

/// Radial Fourier profile of a rotationally invariant function, sampled on a
/// shared [`RadialGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialFn {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialFn {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(RadialFn { grid, values })
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&k| f(k)).collect();
        RadialFn { grid, values }
    }

    pub fn constant(grid: Arc<RadialGrid>, c: f64) -> Self {
        let values = vec![c; grid.len()];
        RadialFn { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Value at `k = 0`, the total mass.
    pub fn at_zero(&self) -> f64 {
        self.values[0]
    }

    /// `max |f̂| at k_max / max |f̂|`.
    pub fn decay_ratio(&self) -> f64 {
        let peak = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if peak == 0.0 {
            return 0.0;
        }
        self.values.last().unwrap().abs() / peak
    }

    pub fn check_decay(&self) -> Result<()> {
        let ratio = self.decay_ratio();
        if ratio > DECAY_TOLERANCE {
            return Err(Error::InsufficientDecay(ratio));
        }
        Ok(())
    }

    /// `f(r) = (2π)^{-d} S_{d−1} ∫₀^{k_max} k^{d−1} f̂(k) Ω_d(k r) dk`.
    ///
    /// Equals `(2π)^{-d/2} r^{1−d/2} ∫ f̂(k) J_{d/2−1}(kr) k^{d/2} dk` for `r > 0`
    /// and is regular at `r = 0`, where `Ω_d = 1`.
    pub fn inverse(&self, radius: f64, d: usize) -> Result<f64> {
        check_dimension(d)?;
        self.check_decay()?;
        if !(radius >= 0.0) {
            return Err(Error::InvalidParameter(format!("radius must be >= 0, got {radius}")));
        }
        Ok(self.inverse_unchecked(radius, d))
    }

    fn inverse_unchecked(&self, radius: f64, d: usize) -> f64 {
        let grid = &self.grid;
        let mut acc = 0.0;
        for ((&k, &w), &v) in grid.nodes().iter().zip(grid.weights()).zip(&self.values) {
            if v == 0.0 {
                continue;
            }
            let kernel = if radius == 0.0 { 1.0 } else { omega_unchecked(d, k * radius) };
            acc += w * k.powi(d as i32 - 1) * v * kernel;
        }
        inverse_prefactor(d) * acc
    }

    /// [`RadialFn::inverse`] over many radii; each radius is one fixed-order sum.
    pub fn inverse_batch(&self, radii: &[f64], d: usize, exec: Exec) -> Result<Vec<f64>> {
        check_dimension(d)?;
        self.check_decay()?;
        if let Some(bad) = radii.iter().find(|r| !(**r >= 0.0)) {
            return Err(Error::InvalidParameter(format!("radius must be >= 0, got {bad}")));
        }
        Ok(exec.map(radii.len(), |i| self.inverse_unchecked(radii[i], d)))
    }

    pub fn same_grid(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid == other.grid
    }
}

/// `(2π)^{-d} S_{d−1}` with `S_{d−1} = 2π^{d/2}/Γ(d/2)`.
fn inverse_prefactor(d: usize) -> f64 {
    let df = d as f64;
    let pi = std::f64::consts::PI;
    let surface = 2.0 * pi.powf(df / 2.0) / gamma_half_integer(d);
    (2.0 * pi).powf(-df) * surface
}

/// `Γ(d/2)` for integer `d ≥ 1`.
pub(crate) fn gamma_half_integer(d: usize) -> f64 {
    let (mut g, mut x) = if d % 2 == 0 { (1.0, 1.0) } else { (std::f64::consts::PI.sqrt(), 0.5) };
    let target = d as f64 / 2.0;
    while x < target - 1e-9 {
        g *= x;
        x += 1.0;
    }
    g
}

/// Surface area `S_{d−1} = 2π^{d/2}/Γ(d/2)` of the unit sphere in `R^d`.
pub fn sphere_area(d: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(d as f64 / 2.0) / gamma_half_integer(d)
}

/// `Σ_j w_j exp(−t_j k²/2)` at each node.
pub fn mixture_hat(mix: &GaussianMixture, grid: &Arc<RadialGrid>) -> RadialFn {
    RadialFn::from_fn(grid.clone(), |k| mix.hat(k))
}

/// Free-function form of [`RadialFn::inverse`].
pub fn inverse_radial_transform(fhat: &RadialFn, radius: f64, d: usize) -> Result<f64> {
    fhat.inverse(radius, d)
}
