use serde::{Deserialize, Serialize};

use super::mixture::{gaussian_moment, GaussianMixture, Term};
use crate::{Error, Result};

/// Shape of a majorant sequence `Γ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MajorantKind {
    /// `Γ_n = n^{-a} φ_{n/2}`, `a > 2` for the decay conditions.
    PowerLaw { a: f64 },
    /// `Γ_n = K n^{-d/2} Σ_{k=1}^{n} k^{1-d/2} φ_{2k/5}`.
    SawMajorant { k: f64 },
}

/// A positive rotationally invariant sequence `Γ_1, Γ_2, …` on `R^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajorantFamily {
    pub kind: MajorantKind,
    pub dim: usize,
}

impl MajorantFamily {
    pub fn power_law(a: f64, dim: usize) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) || dim == 0 {
            return Err(Error::InvalidParameter(format!("power law needs a > 0, d >= 1 (a={a}, d={dim})")));
        }
        Ok(MajorantFamily { kind: MajorantKind::PowerLaw { a }, dim })
    }

    pub fn saw(k: f64, dim: usize) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) || dim == 0 {
            return Err(Error::InvalidParameter(format!("SAW majorant needs K > 0, d >= 1 (K={k}, d={dim})")));
        }
        Ok(MajorantFamily { kind: MajorantKind::SawMajorant { k }, dim })
    }

    /// `Γ_m` as a positive mixture; `m ≥ 1`.
    pub fn gamma(&self, m: usize) -> GaussianMixture {
        assert!(m >= 1, "Γ_m is defined for m >= 1");
        let d = self.dim as f64;
        let mf = m as f64;
        let terms = match self.kind {
            MajorantKind::PowerLaw { a } => vec![Term { weight: mf.powf(-a), variance: mf / 2.0 }],
            MajorantKind::SawMajorant { k } => {
                let pre = k * mf.powf(-d / 2.0);
                (1..=m)
                    .map(|j| {
                        let jf = j as f64;
                        Term { weight: pre * jf.powf(1.0 - d / 2.0), variance: 2.0 * jf / 5.0 }
                    })
                    .collect()
            }
        };
        GaussianMixture::new(self.dim, terms).expect("majorant terms are valid")
    }

    /// `γ^{(k)}(m) = ∫ |y|^{2k} Γ_m(y) dy` in closed form.
    pub fn gamma_moment(&self, m: usize, k: u32) -> f64 {
        assert!(m >= 1 && k <= 2);
        let d = self.dim as f64;
        let mf = m as f64;
        match self.kind {
            MajorantKind::PowerLaw { a } => mf.powf(-a) * gaussian_moment(d, mf / 2.0, k),
            MajorantKind::SawMajorant { k: kk } => {
                let sum: f64 = (1..=m)
                    .map(|j| {
                        let jf = j as f64;
                        jf.powf(1.0 - d / 2.0) * gaussian_moment(d, 2.0 * jf / 5.0, k)
                    })
                    .sum();
                kk * mf.powf(-d / 2.0) * sum
            }
        }
    }

    /// `γ^{(k)}(m)` for `m = 1..=upto` and `k = 0, 1, 2` in `O(upto)` work.
    pub fn moment_table(&self, upto: usize) -> MomentTable {
        let d = self.dim as f64;
        let mut g = [vec![0.0; upto + 1], vec![0.0; upto + 1], vec![0.0; upto + 1]];
        match self.kind {
            MajorantKind::PowerLaw { .. } => {
                for m in 1..=upto {
                    for (k, col) in g.iter_mut().enumerate() {
                        col[m] = self.gamma_moment(m, k as u32);
                    }
                }
            }
            MajorantKind::SawMajorant { k: kk } => {
                let mut prefix = [0.0f64; 3];
                for m in 1..=upto {
                    let jf = m as f64;
                    let w = jf.powf(1.0 - d / 2.0);
                    for (k, p) in prefix.iter_mut().enumerate() {
                        *p += w * gaussian_moment(d, 2.0 * jf / 5.0, k as u32);
                    }
                    let pre = kk * jf.powf(-d / 2.0);
                    for k in 0..3 {
                        g[k][m] = pre * prefix[k];
                    }
                }
            }
        }
        MomentTable { moments: g }
    }

    /// Fits the per-family constant of `χ_{m+n}(m)` from pointwise domination of
    /// `Γ_m * Γ_n` by `((m+n)/(mn))^{e} Γ_{m+n}` over `m, n ≤ n_fit` on `radii`.
    ///
    /// For the power law the identity `φ_{m/2} * φ_{n/2} = φ_{(m+n)/2}` makes
    /// the constant exactly one.
    pub fn chi(&self, n_fit: usize, radii: &[f64]) -> Chi {
        let constant = match self.kind {
            MajorantKind::PowerLaw { .. } => 1.0,
            MajorantKind::SawMajorant { .. } => {
                let gammas: Vec<GaussianMixture> = (0..=2 * n_fit)
                    .map(|m| if m == 0 { GaussianMixture::zero(self.dim) } else { self.gamma(m) })
                    .collect();
                let unit = Chi { family: *self, constant: 1.0 };
                let mut sup = 0.0f64;
                for m in 1..=n_fit {
                    for n in m..=n_fit {
                        let conv = gammas[m].convolve(&gammas[n]);
                        let scale = unit.value(m, n);
                        for &r in radii {
                            let ln_ratio = conv.ln_eval(r) - gammas[m + n].ln_eval(r);
                            sup = sup.max(ln_ratio.exp() / scale);
                        }
                    }
                }
                sup
            }
        };
        Chi { family: *self, constant }
    }
}

/// Cached `γ^{(k)}(m)`; index 0 is unused and zero.
#[derive(Debug, Clone)]
pub struct MomentTable {
    moments: [Vec<f64>; 3],
}

impl MomentTable {
    pub fn len(&self) -> usize {
        self.moments[0].len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, m: usize, k: u32) -> f64 {
        self.moments[k as usize][m]
    }

    pub fn column(&self, k: u32) -> &[f64] {
        &self.moments[k as usize]
    }
}

/// The numbers `χ_{m+n}(m)` of the convolution domination condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chi {
    pub family: MajorantFamily,
    /// Multiplicative constant; exactly 1 for the power law, fitted otherwise.
    pub constant: f64,
}

impl Chi {
    /// `χ_{m+n}(m)`; symmetric in `(m, n)`.
    pub fn value(&self, m: usize, n: usize) -> f64 {
        let (mf, nf) = (m as f64, n as f64);
        let base = (mf + nf) / (mf * nf);
        let exponent = match self.family.kind {
            MajorantKind::PowerLaw { a } => a,
            MajorantKind::SawMajorant { .. } => self.family.dim as f64 / 2.0,
        };
        self.constant * base.powf(exponent)
    }
}

/// 64 geometric radii spanning `[10⁻², 10 √n_max]`.
pub fn default_radius_grid(n_max: usize) -> Vec<f64> {
    geometric_grid(1e-2, 10.0 * (n_max.max(1) as f64).sqrt(), 64)
}

pub fn geometric_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && points >= 2);
    let ratio = (hi / lo).ln() / (points - 1) as f64;
    (0..points).map(|i| lo * (ratio * i as f64).exp()).collect()
}
