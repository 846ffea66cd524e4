//! The reference profiles `ψ_n`, `f_n`, `κ(n)` and the Gaussian inequalities
//! they rely on.

use std::f64::consts::PI;

use super::majorant::MajorantFamily;
use super::mixture::{ln_gaussian_density, GaussianMixture};
use super::zeta::ZetaTable;
use crate::{Error, Result};

/// Parameters of the reference Gaussians `ψ_n = φ_{nδ(1+ε)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiScale {
    pub delta: f64,
    pub epsilon: f64,
}

impl PsiScale {
    pub fn new(delta: f64, epsilon: f64) -> Result<Self> {
        if !(delta > 0.0 && delta.is_finite()) || !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ψ needs δ > 0 and ε >= 0 (δ={delta}, ε={epsilon})"
            )));
        }
        Ok(PsiScale { delta, epsilon })
    }

    pub fn variance(&self, n: usize) -> f64 {
        n as f64 * self.delta * (1.0 + self.epsilon)
    }
}

/// `ψ_n` as a single-term mixture; `n ≥ 1`.
pub fn psi_n(dim: usize, scale: PsiScale, n: usize) -> GaussianMixture {
    assert!(n >= 1);
    GaussianMixture::gaussian(dim, scale.variance(n)).expect("positive variance")
}

/// `Σ_{s=1}^{⌊n/2⌋} w(s) ψ_s * Γ_{n−s} + tail · ψ_n`.
fn profile(
    family: &MajorantFamily,
    scale: PsiScale,
    n: usize,
    weight: impl Fn(usize) -> f64,
    tail: f64,
) -> GaussianMixture {
    let d = family.dim;
    let mut out = psi_n(d, scale, n).scaled(tail);
    for s in 1..=n / 2 {
        out.add_scaled(&family.gamma(n - s).convolve_gaussian(scale.variance(s)), weight(s));
    }
    out.compact();
    out
}

/// `f_n = Σ_{s=1}^{⌊n/2⌋} s ψ_s * Γ_{n−s} + ζ̄(n) ψ_n`, for `1 ≤ n ≤ zeta.n_max()`.
pub fn f_profile(family: &MajorantFamily, zeta: &ZetaTable, scale: PsiScale, n: usize) -> GaussianMixture {
    profile(family, scale, n, |s| s as f64, zeta.zeta_bar(n))
}

/// `κ(n) = Σ_{s=1}^{⌊n/2⌋} ψ_s * Γ_{n−s} + (ζ̄(n)/n) ψ_n`.
pub fn kappa_profile(family: &MajorantFamily, zeta: &ZetaTable, scale: PsiScale, n: usize) -> GaussianMixture {
    profile(family, scale, n, |_| 1.0, zeta.zeta_bar(n) / n as f64)
}

/// Empirical constant `sup_{2 ≤ n ≤ n_max} sup_r (Σ_{j=1}^{n} κ(j) * f_{n−j})(r) / f_n(r)`,
/// with `f_0` the point mass at the origin.
pub fn le_main_check(
    family: &MajorantFamily,
    zeta: &ZetaTable,
    scale: PsiScale,
    n_max: usize,
    radii: &[f64],
) -> Result<f64> {
    if n_max < 2 || n_max > zeta.n_max() {
        return Err(Error::InvalidParameter(format!(
            "le_main_check needs 2 <= n_max <= {} (got {n_max})",
            zeta.n_max()
        )));
    }
    let f: Vec<GaussianMixture> = (1..=n_max).map(|n| f_profile(family, zeta, scale, n)).collect();
    let kappa: Vec<GaussianMixture> = (1..=n_max).map(|n| kappa_profile(family, zeta, scale, n)).collect();
    let mut sup = 0.0f64;
    for n in 2..=n_max {
        let mut lhs = kappa[n - 1].clone();
        for j in 1..n {
            lhs = lhs.add(&kappa[j - 1].convolve(&f[n - j - 1]));
        }
        lhs.compact();
        for &r in radii {
            sup = sup.max((lhs.ln_eval(r) - f[n - 1].ln_eval(r)).exp());
        }
    }
    Ok(sup)
}

/// `sup φ_t(r) / (2^{d/2} φ_s(r))` over `t ≤ s ≤ 2t` drawn from `pairs` and the
/// radii; at most one when the semigroup comparison holds.
pub fn phi1_sup(d: usize, pairs: &[(f64, f64)], radii: &[f64]) -> f64 {
    let ln_bound = d as f64 / 2.0 * 2f64.ln();
    let mut sup = 0.0f64;
    for &(t, s) in pairs {
        assert!(t <= s && s <= 2.0 * t);
        for &r in radii {
            let ln_ratio = ln_gaussian_density(d, t, r) - ln_gaussian_density(d, s, r) - ln_bound;
            sup = sup.max(ln_ratio.exp());
        }
    }
    sup
}

/// Points `x, y ∈ R^d` described by their norms and the cosine of their angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointPair {
    pub x: f64,
    pub y: f64,
    pub cos: f64,
}

/// `ln ∫ φ_u(z) φ_v(x−z) φ_s(z) φ_t(y−z) dz` in closed form.
pub fn ln_four_gaussian(d: usize, u: f64, v: f64, s: f64, t: f64, p: PointPair) -> f64 {
    let df = d as f64;
    let precision = 1.0 / u + 1.0 / v + 1.0 / s + 1.0 / t;
    let b2 = p.x * p.x / (v * v) + p.y * p.y / (t * t) + 2.0 * p.x * p.y * p.cos / (v * t);
    let ln_norm = -df / 2.0 * ((2.0 * PI).ln() * 4.0 + (u * v * s * t).ln());
    ln_norm + df / 2.0 * (2.0 * PI / precision).ln() + b2 / (2.0 * precision)
        - p.x * p.x / (2.0 * v)
        - p.y * p.y / (2.0 * t)
}

/// `ln` of `[(u+v)/(uv)]^{d/4} [(s+t)/(st)]^{d/4} φ_{u+v}(x) φ_{s+t}(y)`.
pub fn ln_four_gaussian_bound(d: usize, u: f64, v: f64, s: f64, t: f64, p: PointPair) -> f64 {
    let q = d as f64 / 4.0;
    q * ((u + v) / (u * v)).ln()
        + q * ((s + t) / (s * t)).ln()
        + ln_gaussian_density(d, u + v, p.x)
        + ln_gaussian_density(d, s + t, p.y)
}

/// Fitted constant of the four-Gaussian product inequality: the sup of the
/// integral over its bound on the sampled grid.
pub fn convol_constant(d: usize, variances: &[f64], norms: &[f64], cosines: &[f64]) -> f64 {
    let mut sup = 0.0f64;
    for &u in variances {
        for &v in variances {
            for &s in variances {
                for &t in variances {
                    for &x in norms {
                        for &y in norms {
                            for &cos in cosines {
                                let p = PointPair { x, y, cos };
                                let ln_ratio = ln_four_gaussian(d, u, v, s, t, p)
                                    - ln_four_gaussian_bound(d, u, v, s, t, p);
                                sup = sup.max(ln_ratio.exp());
                            }
                        }
                    }
                }
            }
        }
    }
    sup
}
