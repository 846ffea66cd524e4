use serde::{Deserialize, Serialize};

use super::params::{sample_path, SawParams};
use crate::exec::Exec;
use crate::gamma::{gaussian_density, r_n, PsiScale};
use crate::lace::laces::BRUTE_FORCE_MAX_LEN;
use crate::lace::{Contacts, JEvaluator, Path};
use crate::mc::{McEstimate, Moments, PairSums};
use crate::spectral::bessel::omega_unchecked;
use crate::spectral::sphere_area;
use crate::{Error, Result};

/// Largest `m` for which `Π_m` observables are estimated.
pub const PI_MAX_M: usize = BRUTE_FORCE_MAX_LEN as usize;

/// Runs `visit` on every sample path in fixed blocks and merges the per-block
/// accumulators in block order.
pub(crate) fn accumulate<A, F>(params: &SawParams, exec: Exec, init: impl Fn() -> A + Sync + Send, visit: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut A, &Path) + Sync + Send,
{
    exec.map_blocks(params.n_samples as usize, |range| {
        let mut acc = init();
        for idx in range {
            visit(&mut acc, &sample_path(params, idx as u64));
        }
        acc
    })
}

fn merge_moments(blocks: Vec<Vec<Moments>>) -> Vec<McEstimate> {
    let mut total = blocks.first().map(|b| vec![Moments::default(); b.len()]).unwrap_or_default();
    for b in &blocks {
        for (t, m) in total.iter_mut().zip(b) {
            t.merge(m);
        }
    }
    total.iter().map(Moments::estimate).collect()
}

/// `K[a, b]` from a contact table.
pub(crate) fn k_from(contacts: &Contacts, a: usize, b: usize, lambda: f64) -> f64 {
    (1.0 - lambda).powi(contacts.count(a, b) as i32)
}

/// `c_m^SAW = E[K[0, m]]` for `m = 1..=n`, all from the same paths.
pub fn estimate_cn_all(params: &SawParams, exec: Exec) -> Result<Vec<McEstimate>> {
    params.validate()?;
    if params.lambda == 0.0 {
        return Ok(vec![McEstimate::exact(1.0, params.n_samples); params.n]);
    }
    let blocks = accumulate(params, exec, || vec![Moments::default(); params.n], |acc, path| {
        let contacts = Contacts::new(path, params.rho);
        for m in 1..=params.n {
            acc[m - 1].push(k_from(&contacts, 0, m, params.lambda));
        }
    });
    Ok(merge_moments(blocks))
}

/// `c_n^SAW`.
pub fn estimate_cn_saw(params: &SawParams, exec: Exec) -> Result<McEstimate> {
    Ok(*estimate_cn_all(params, exec)?.last().expect("n >= 1"))
}

fn check_m(m: usize) -> Result<()> {
    if m == 0 || m > PI_MAX_M {
        return Err(Error::TooLarge(format!("Π_m estimation needs 1 <= m <= {PI_MAX_M}, got {m}")));
    }
    Ok(())
}

/// `π_m = E[J[0, m]]` and `E[J[0, m] |x_m|²] = ∫ |x|² Π_m`.
pub fn estimate_pi_moments(params: &SawParams, m: usize, exec: Exec) -> Result<(McEstimate, McEstimate)> {
    params.validate()?;
    check_m(m)?;
    if params.lambda == 0.0 {
        let zero = McEstimate::exact(0.0, params.n_samples);
        return Ok((zero, zero));
    }
    let params = params.with_n(m);
    let eval = JEvaluator::new(m)?;
    let blocks = accumulate(&params, exec, || vec![Moments::default(); 2], |acc, path| {
        let contacts = Contacts::new(path, params.rho);
        let j = eval.j(&contacts, 0, m, params.lambda);
        acc[0].push(j);
        acc[1].push(j * path.end_norm2());
    });
    let est = merge_moments(blocks);
    Ok((est[0], est[1]))
}

/// `Π̂_m(k) = E[J[0, m] Ω_d(k |x_m|)]` at each frequency.
pub fn estimate_pi_hat(params: &SawParams, m: usize, k_nodes: &[f64], exec: Exec) -> Result<Vec<McEstimate>> {
    params.validate()?;
    check_m(m)?;
    if params.lambda == 0.0 {
        return Ok(vec![McEstimate::exact(0.0, params.n_samples); k_nodes.len()]);
    }
    let params = params.with_n(m);
    let eval = JEvaluator::new(m)?;
    let d = params.d;
    let blocks = accumulate(&params, exec, || vec![Moments::default(); k_nodes.len()], |acc, path| {
        let contacts = Contacts::new(path, params.rho);
        let j = eval.j(&contacts, 0, m, params.lambda);
        let r = path.end_norm2().sqrt();
        for (a, &k) in acc.iter_mut().zip(k_nodes) {
            a.push(if j == 0.0 { 0.0 } else { j * omega_unchecked(d, k * r) });
        }
    });
    Ok(merge_moments(blocks))
}

/// Endpoint density estimate with its bandwidth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub radii: Vec<f64>,
    /// Estimates of `C_n(x) / c_n` at `|x| = radius`.
    pub values: Vec<McEstimate>,
    pub bandwidth: f64,
}

/// `h = 0.5 √n · N^{−1/7}`.
pub fn default_bandwidth(n: usize, n_samples: u64) -> f64 {
    0.5 * (n as f64).sqrt() * (n_samples as f64).powf(-1.0 / 7.0)
}

fn epanechnikov(u: f64, h: f64) -> f64 {
    let z = u / h;
    if z.abs() >= 1.0 {
        0.0
    } else {
        0.75 / h * (1.0 - z * z)
    }
}

/// Weighted radial kernel estimate of `C_n(x)/c_n`: the weight of a path is
/// `K[0, n]`, its radius `|x_n|` is smoothed with an Epanechnikov kernel of
/// bandwidth `h`, and the radial density is divided by `S_{d−1} r^{d−1}`.
/// The ratio to the mean weight carries a delta-method standard error.
pub fn estimate_endpoint_density(
    params: &SawParams,
    radii: &[f64],
    bandwidth: Option<f64>,
    exec: Exec,
) -> Result<DensityEstimate> {
    params.validate()?;
    if let Some(bad) = radii.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::InvalidParameter(format!("density radii must be > 0, got {bad}")));
    }
    let h = bandwidth.unwrap_or_else(|| default_bandwidth(params.n, params.n_samples));
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("bandwidth must be > 0, got {h}")));
    }
    let blocks = accumulate(params, exec, || vec![PairSums::default(); radii.len()], |acc, path| {
        let w = if params.lambda == 0.0 {
            1.0
        } else {
            k_from(&Contacts::new(path, params.rho), 0, params.n, params.lambda)
        };
        let r = path.end_norm2().sqrt();
        for (a, &r0) in acc.iter_mut().zip(radii) {
            a.push(w * epanechnikov(r - r0, h), w);
        }
    });
    let mut total = vec![PairSums::default(); radii.len()];
    for b in &blocks {
        for (t, s) in total.iter_mut().zip(b) {
            t.merge(s);
        }
    }
    let surface = sphere_area(params.d);
    let values = total
        .iter()
        .zip(radii)
        .map(|(s, &r)| s.ratio().scaled(1.0 / (surface * r.powi(params.d as i32 - 1))))
        .collect();
    Ok(DensityEstimate { radii: radii.to_vec(), values, bandwidth: h })
}

/// `r_n ψ_n(r) + n^{−d/2} Σ_{j=1}^{⌈n/2⌉} j ψ_j(r)` with `ψ_j = φ_{jδ(1+ε)}`:
/// the shape of the SAW local CLT bound, without its constant.
pub fn saw_bound_shape(d: usize, n: usize, delta: f64, epsilon: f64, r: f64) -> Result<f64> {
    let rn = r_n(d, n.max(2))?;
    let scale = PsiScale::new(delta, epsilon)?;
    let psi = |j: usize| gaussian_density(d, scale.variance(j), r);
    let near: f64 = (1..=n.div_ceil(2)).map(|j| j as f64 * psi(j)).sum();
    Ok(rn * psi(n) + (n as f64).powf(-(d as f64) / 2.0) * near)
}
