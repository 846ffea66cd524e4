use super::laces::{overline, underline, Lace};
use crate::exec::Exec;
use crate::gamma::{GaussianMixture, MajorantFamily};
use crate::mc::{fill_standard_normal, sample_mixture, sample_rng, McEstimate, Moments};
use crate::{Error, Result};

/// The positive kernel family `G_t` chained along a lace; `G_0` is the point mass.
#[derive(Debug, Clone, PartialEq)]
pub enum XiKernel {
    /// `G_t = φ_t` for real `t ≥ 0`.
    Semigroup { dim: usize },
    /// `G_m = Γ_m` at integer indices.
    Majorant(MajorantFamily),
    /// `G_m = mixtures[m − 1]` at integer indices, nonnegative weights.
    Sequence { dim: usize, mixtures: Vec<GaussianMixture> },
}

impl XiKernel {
    pub fn dim(&self) -> usize {
        match self {
            XiKernel::Semigroup { dim } | XiKernel::Sequence { dim, .. } => *dim,
            XiKernel::Majorant(f) => f.dim,
        }
    }

    /// `G_t`, `None` for the point mass `t = 0`.
    fn at(&self, t: f64) -> Result<Option<GaussianMixture>> {
        if t == 0.0 {
            return Ok(None);
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("kernel index must be >= 0, got {t}")));
        }
        let integer = || -> Result<usize> {
            if t.fract() != 0.0 {
                return Err(Error::InvalidParameter(format!("kernel only defined at integers, got {t}")));
            }
            Ok(t as usize)
        };
        let mix = match self {
            XiKernel::Semigroup { dim } => GaussianMixture::gaussian(*dim, t)?,
            XiKernel::Majorant(f) => f.gamma(integer()?),
            XiKernel::Sequence { mixtures, .. } => {
                let m = integer()?;
                mixtures
                    .get(m - 1)
                    .cloned()
                    .ok_or_else(|| Error::InvalidParameter(format!("no kernel G_{m}")))?
            }
        };
        if !mix.has_nonnegative_weights() {
            return Err(Error::InvalidParameter("kernel must be nonnegative".into()));
        }
        Ok(Some(mix))
    }
}

/// Monte Carlo estimate of `∫ Ξ_ℓ(G, ρ, t)(x) dx`: points `x_0 = 0, …, x_{2N−1}`
/// joined by increments `G_{m_i + t_i}`, weighted by `Π_i 1{|x_{ī} − x_{i̲}| ≤ ρ}`.
///
/// Increments are drawn from the normalized kernels and the result is rescaled
/// by the product of their masses. `N ∈ {1, 2, 3}`.
pub fn xi_mc(
    lace: &Lace,
    kernel: &XiKernel,
    rho: f64,
    t_shift: &[f64],
    samples: u64,
    seed: u64,
    exec: Exec,
) -> Result<McEstimate> {
    let nb = lace.n_bonds();
    if nb > 3 {
        return Err(Error::Unsupported(format!("Ξ estimation supports N <= 3, got N = {nb}")));
    }
    let k = lace.m().len();
    if !t_shift.is_empty() && t_shift.len() != k {
        return Err(Error::InvalidParameter(format!("shift needs {k} entries, got {}", t_shift.len())));
    }
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("ρ must be > 0, got {rho}")));
    }
    let kernels: Vec<Option<GaussianMixture>> = (0..k)
        .map(|i| kernel.at(lace.m()[i] as f64 + t_shift.get(i).copied().unwrap_or(0.0)))
        .collect::<Result<_>>()?;
    let mass: f64 = kernels.iter().flatten().map(|g| g.mass()).product();
    let d = kernel.dim();
    let bonds: Vec<(usize, usize)> = (1..=nb).map(|i| (underline(i), overline(i, nb))).collect();
    let rho2 = rho * rho;

    let blocks = exec.map_blocks(samples as usize, |range| {
        let mut acc = Moments::default();
        let mut pts = vec![0.0; (k + 1) * d];
        let mut inc = vec![0.0; d];
        for idx in range {
            let mut rng = sample_rng(seed, idx as u64);
            for (i, g) in kernels.iter().enumerate() {
                match g {
                    None => inc.iter_mut().for_each(|v| *v = 0.0),
                    Some(g) if g.len() == 1 => {
                        fill_standard_normal(&mut rng, &mut inc);
                        let sd = g.terms()[0].variance.sqrt();
                        inc.iter_mut().for_each(|v| *v *= sd);
                    }
                    Some(g) => sample_mixture(&mut rng, g, &mut inc),
                }
                for c in 0..d {
                    pts[(i + 1) * d + c] = pts[i * d + c] + inc[c];
                }
            }
            let hit = bonds.iter().all(|&(lo, hi)| {
                let r2: f64 = (0..d).map(|c| (pts[hi * d + c] - pts[lo * d + c]).powi(2)).sum();
                r2 <= rho2
            });
            acc.push(if hit { 1.0 } else { 0.0 });
        }
        acc
    });
    let mut total = Moments::default();
    blocks.iter().for_each(|b| total.merge(b));
    Ok(total.estimate().scaled(mass))
}
