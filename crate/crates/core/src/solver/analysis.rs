use serde::{Deserialize, Serialize};

use super::recursion::SolverRun;
use crate::gamma::mixture::ln_gaussian_density;
use crate::gamma::{f_profile, gaussian_density, kappa_profile, GaussianMixture};
use crate::spectral::sphere_area;
use crate::{Error, Result};

/// How real-space values of `C_n` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityRoute {
    /// Closed-form evaluation of the real-space mixture recursion.
    Mixture,
    /// Inverse radial transform of `Ĉ_n`.
    Transform,
}

impl SolverRun {
    pub fn preferred_route(&self) -> DensityRoute {
        if self.c_mix.is_some() {
            DensityRoute::Mixture
        } else {
            DensityRoute::Transform
        }
    }

    /// `C_n(r)` on `radii`, `n ≥ 1`.
    pub fn density(&self, n: usize, radii: &[f64], route: DensityRoute) -> Result<Vec<f64>> {
        check_n(self, n)?;
        match route {
            DensityRoute::Mixture => {
                let mix = self.c_mix.as_ref().ok_or_else(|| {
                    Error::Unsupported("kernel family has no real-space form".into())
                })?;
                Ok(radii.iter().map(|&r| mix[n].eval(r)).collect())
            }
            DensityRoute::Transform => self.c_hat[n].inverse_batch(radii, self.d(), self.config.exec),
        }
    }
}

fn check_n(run: &SolverRun, n: usize) -> Result<()> {
    if n == 0 || n > run.n_max() {
        return Err(Error::InvalidParameter(format!("n must lie in 1..={} (got {n})", run.n_max())));
    }
    Ok(())
}

/// `|C_n(r)/c_n − φ_{nδ}(r)|` on the run's radius grid.
pub fn clt_error_profile(run: &SolverRun, n: usize) -> Result<Vec<f64>> {
    clt_error_at(run, n, &run.radii)
}

pub fn clt_error_at(run: &SolverRun, n: usize, radii: &[f64]) -> Result<Vec<f64>> {
    let dens = run.density(n, radii, run.preferred_route())?;
    let cn = run.c(n);
    let t = n as f64 * run.delta();
    Ok(radii
        .iter()
        .zip(dens)
        .map(|(&r, v)| (v / cn - gaussian_density(run.d(), t, r)).abs())
        .collect())
}

/// The bound mixture `λ f_n = λ [Σ_{s ≤ n/2} s ψ_s * Γ_{n−s} + ζ̄(n) ψ_n]`.
pub fn bound_mixture(run: &SolverRun, n: usize) -> Result<GaussianMixture> {
    check_n(run, n)?;
    let (majorant, zeta) = match (run.config.family.majorant(), &run.zeta) {
        (Some(g), Some(z)) => (g, z),
        _ => return Err(Error::Unsupported("bound profile needs a declared majorant".into())),
    };
    Ok(f_profile(&majorant, zeta, run.psi_scale(), n).scaled(run.config.lambda))
}

pub fn bound_profile(run: &SolverRun, n: usize) -> Result<Vec<f64>> {
    let b = bound_mixture(run, n)?;
    Ok(run.radii.iter().map(|&r| b.eval(r)).collect())
}

/// `error / bound` per radius, evaluated relative to the bound's logarithm so
/// that far tails stay representable. All zeros at `λ = 0`.
pub fn ratio_profile(run: &SolverRun, n: usize) -> Result<Vec<f64>> {
    if run.config.lambda == 0.0 {
        check_n(run, n)?;
        return Ok(vec![0.0; run.radii.len()]);
    }
    let bound = bound_mixture(run, n)?;
    let cn = run.c(n);
    let t = n as f64 * run.delta();
    let d = run.d();
    match &run.c_mix {
        Some(mix) => Ok(run
            .radii
            .iter()
            .map(|&r| {
                let ln_b = bound.ln_eval(r);
                let own = mix[n].eval_relative(r, ln_b) / cn;
                let gauss = (ln_gaussian_density(d, t, r) - ln_b).exp();
                (own - gauss).abs()
            })
            .collect()),
        None => {
            let err = clt_error_profile(run, n)?;
            Ok(run.radii.iter().zip(err).map(|(&r, e)| e / bound.eval(r)).collect())
        }
    }
}

/// `sup_r error/bound` for each requested `n`.
pub fn ratio_report(run: &SolverRun, n_list: &[usize]) -> Result<Vec<(usize, f64)>> {
    n_list
        .iter()
        .map(|&n| Ok((n, ratio_profile(run, n)?.into_iter().fold(0.0, f64::max))))
        .collect()
}

/// `∫ S_{d−1} r^{d−1} |C_n(r)/c_n − φ_{nδ}(r)| dr` by the trapezoid rule on
/// `points` uniform radii in `[0, 10 √(n max(δ, 1))]`.
pub fn l1_error(run: &SolverRun, n: usize, points: usize) -> Result<f64> {
    if points < 2 {
        return Err(Error::InvalidParameter("need at least two radii".into()));
    }
    let r_max = 10.0 * (n as f64 * run.delta().max(1.0)).sqrt();
    let h = r_max / (points - 1) as f64;
    let radii: Vec<f64> = (0..points).map(|i| i as f64 * h).collect();
    let err = clt_error_at(run, n, &radii)?;
    let d = run.d() as i32;
    let mut acc = 0.0;
    for (i, (&r, e)) in radii.iter().zip(&err).enumerate() {
        let w = if i == 0 || i == points - 1 { 0.5 } else { 1.0 };
        acc += w * r.powi(d - 1) * e;
    }
    Ok(sphere_area(run.d()) * h * acc)
}

/// `Δ(k,j) = a_j φ_{kδ} − μ^{-1} a_{j−1} φ_{(k−1)δ+1} − λ Σ_{m=1}^{j} a_m a_{j−m} B_m * φ_{(k−m)δ}`
/// for `1 ≤ j ≤ k`, with `φ_0` the point mass.
pub fn delta_mixture(run: &SolverRun, k: usize, j: usize) -> Result<GaussianMixture> {
    if j == 0 || j > k || k > run.n_max() {
        return Err(Error::InvalidParameter(format!("Δ(k, j) needs 1 <= j <= k <= n_max (k={k}, j={j})")));
    }
    let sol = &run.solution;
    let delta = sol.delta;
    let d = run.d();
    let lambda = run.config.lambda;
    let kf = k as f64;
    let mut out = GaussianMixture::single(d, sol.a[j], kf * delta)?;
    out.add_scaled(&GaussianMixture::gaussian(d, (kf - 1.0) * delta + 1.0)?, -sol.a[j - 1] / sol.mu);
    for m in 1..=j {
        let b = run
            .config
            .family
            .mixture(m)
            .ok_or_else(|| Error::Unsupported("Δ(k, j) needs real-space kernels".into()))?;
        out.add_scaled(&b.convolve_gaussian((k - m) as f64 * delta), -lambda * sol.a[m] * sol.a[j - m]);
    }
    Ok(out)
}

/// Empirical constant `sup_r Σ_{j=1}^{n} |Δ(n,j)(r)| / (λ f_n(r))`.
pub fn delta_kj_check(run: &SolverRun, n: usize) -> Result<f64> {
    if run.config.lambda == 0.0 {
        return Ok(0.0);
    }
    let f = bound_mixture(run, n)?;
    let deltas: Vec<GaussianMixture> = (1..=n).map(|j| delta_mixture(run, n, j)).collect::<Result<_>>()?;
    let mut sup = 0.0f64;
    for &r in &run.radii {
        let ln_f = f.ln_eval(r);
        let s: f64 = deltas.iter().map(|dm| dm.eval_relative(r, ln_f).abs()).sum();
        sup = sup.max(s);
    }
    Ok(sup)
}

/// Empirical constant `sup_{j ≤ n} sup_r |Δ(j,j)(r)| / (λ [Σ_{s=0}^{⌊j/2⌋} ψ_s * Γ_{j−s} + (ζ̄(j)/j) ψ_j])`,
/// where the `s = 0` term is `Γ_j`.
pub fn delta_jj_check(run: &SolverRun, n: usize) -> Result<f64> {
    check_n(run, n)?;
    if run.config.lambda == 0.0 {
        return Ok(0.0);
    }
    let (majorant, zeta) = match (run.config.family.majorant(), &run.zeta) {
        (Some(g), Some(z)) => (g, z),
        _ => return Err(Error::Unsupported("Δ(j, j) bound needs a declared majorant".into())),
    };
    let lambda = run.config.lambda;
    let mut sup = 0.0f64;
    for j in 1..=n {
        let dm = delta_mixture(run, j, j)?;
        let bound = kappa_profile(&majorant, zeta, run.psi_scale(), j).add(&majorant.gamma(j)).scaled(lambda);
        for &r in &run.radii {
            sup = sup.max(dm.eval_relative(r, bound.ln_eval(r)).abs());
        }
    }
    Ok(sup)
}

/// One line of the per-`n` profile table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub n: usize,
    pub radius: f64,
    /// `C_n(r) / c_n`.
    pub c_density: f64,
    /// `φ_{nδ}(r)`.
    pub gauss_ref: f64,
    pub error: f64,
    /// `λ f_n(r)`, NaN without a majorant.
    pub bound: f64,
    pub ratio: f64,
}

pub fn profile_rows(run: &SolverRun, n: usize) -> Result<Vec<ProfileRow>> {
    let dens = run.density(n, &run.radii, run.preferred_route())?;
    let (bound, ratio) = if run.config.family.majorant().is_some() {
        (bound_profile(run, n)?, ratio_profile(run, n)?)
    } else {
        (vec![f64::NAN; run.radii.len()], vec![f64::NAN; run.radii.len()])
    };
    let cn = run.c(n);
    let t = n as f64 * run.delta();
    Ok(run
        .radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let c_density = dens[i] / cn;
            let gauss_ref = gaussian_density(run.d(), t, r);
            ProfileRow {
                n,
                radius: r,
                c_density,
                gauss_ref,
                error: (c_density - gauss_ref).abs(),
                bound: bound[i],
                ratio: ratio[i],
            }
        })
        .collect())
}
