use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::estimators::{k_from, PI_MAX_M};
use super::params::{sample_path, SawParams};
use crate::exec::Exec;
use crate::gamma::MajorantFamily;
use crate::lace::{Contacts, JEvaluator};
use crate::mc::McEstimate;
use crate::solver::{run_recursion, BFamilySpec, SolverConfig, SolverRun};
use crate::spectral::bessel::omega_unchecked;
use crate::spectral::{RadialFn, RadialGrid};
use crate::{Error, Result};

pub const DEFAULT_BATCHES: usize = 50;
/// Absolute error added in quadrature before forming z-scores of
/// differences between normalized quantities, so that values equal up to
/// rounding (e.g. `c_1`, or any profile at `k = 0`) give `z ≈ 0`.
pub const Z_ROUNDING_FLOOR: f64 = 1e-12;

fn z_floored(e: &McEstimate) -> f64 {
    McEstimate { stderr: e.stderr.hypot(Z_ROUNDING_FLOOR), ..*e }.z_score(0.0)
}

/// Frequency grid shared by the `Π̂_m` estimates and the solver.
pub fn default_k_grid() -> Arc<RadialGrid> {
    RadialGrid::uniform(8.0, 65).expect("valid grid").shared()
}

#[derive(Debug, Clone)]
pub struct CrossCheckConfig {
    pub n_max: usize,
    pub grid: Arc<RadialGrid>,
    /// Number of contiguous sample batches used for the standard errors.
    pub n_batches: usize,
}

impl CrossCheckConfig {
    pub fn new(n_max: usize) -> Self {
        CrossCheckConfig { n_max, grid: default_k_grid(), n_batches: DEFAULT_BATCHES }
    }
}

/// Raw sums over one batch of paths.
#[derive(Debug, Clone)]
struct BatchSums {
    n: u64,
    k: Vec<f64>,
    pi: Vec<f64>,
    pi_bar: Vec<f64>,
    /// `[m][k-node]`
    pi_hat: Vec<Vec<f64>>,
    /// `Σ K[0,n] Ω_d(k|x_n|)`, `[n][k-node]`
    profile: Vec<Vec<f64>>,
}

impl BatchSums {
    fn new(n_max: usize, nodes: usize) -> Self {
        BatchSums {
            n: 0,
            k: vec![0.0; n_max],
            pi: vec![0.0; n_max],
            pi_bar: vec![0.0; n_max],
            pi_hat: vec![vec![0.0; nodes]; n_max],
            profile: vec![vec![0.0; nodes]; n_max],
        }
    }

    fn merge(&mut self, o: &BatchSums) {
        self.n += o.n;
        let add = |a: &mut [f64], b: &[f64]| a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
        add(&mut self.k, &o.k);
        add(&mut self.pi, &o.pi);
        add(&mut self.pi_bar, &o.pi_bar);
        for (a, b) in self.pi_hat.iter_mut().zip(&o.pi_hat) {
            add(a, b);
        }
        for (a, b) in self.profile.iter_mut().zip(&o.profile) {
            add(a, b);
        }
    }
}

/// Means derived from one set of sums.
#[derive(Debug, Clone)]
struct Derived {
    c_mc: Vec<f64>,
    pi: Vec<f64>,
    pi_bar: Vec<f64>,
    b_hat: Vec<Vec<f64>>,
    c_solver: Vec<f64>,
    /// `Ĉ_n(k)/c_n` from the solver and from the weighted paths.
    profile_solver: Vec<Vec<f64>>,
    profile_mc: Vec<Vec<f64>>,
    mu: f64,
    alpha: f64,
    delta: f64,
}

fn derive(s: &BatchSums, params: &SawParams, cfg: &CrossCheckConfig) -> Result<(Derived, SolverRun)> {
    let n = s.n as f64;
    let lambda = params.lambda;
    let d = params.d;
    let c_mc: Vec<f64> = s.k.iter().map(|x| x / n).collect();
    let pi: Vec<f64> = s.pi.iter().map(|x| x / n).collect();
    let pi_bar: Vec<f64> = s.pi_bar.iter().map(|x| x / n).collect();
    // B_m = Π_m / (λ c_m); the zero family when λ = 0.
    let scale: Vec<f64> = c_mc.iter().map(|c| if lambda == 0.0 { 0.0 } else { 1.0 / (lambda * c) }).collect();
    let b: Vec<f64> = pi.iter().zip(&scale).map(|(p, f)| p * f).collect();
    let b_bar: Vec<f64> = pi_bar.iter().zip(&scale).map(|(p, f)| p * f / d as f64).collect();
    let b_hat: Vec<Vec<f64>> = s
        .pi_hat
        .iter()
        .zip(&scale)
        .map(|(row, f)| row.iter().map(|p| p / n * f).collect())
        .collect();
    let hats = b_hat
        .iter()
        .map(|v| RadialFn::new(cfg.grid.clone(), v.clone()))
        .collect::<Result<Vec<_>>>()?;
    let family = BFamilySpec::tabulated(d, hats, b, b_bar)?;
    let mut config = SolverConfig::new(family, lambda, cfg.n_max);
    config.grid = Some(cfg.grid.clone());
    config.radius_grid = Some(vec![1.0]);
    config.exec = Exec::Sequential;
    let run = run_recursion(config)?;
    let c_solver: Vec<f64> = (1..=cfg.n_max).map(|m| run.c(m)).collect();
    let profile_solver: Vec<Vec<f64>> = (1..=cfg.n_max)
        .map(|m| run.c_hat[m].values().iter().map(|v| v / run.c(m)).collect())
        .collect();
    let profile_mc: Vec<Vec<f64>> = s
        .profile
        .iter()
        .zip(&s.k)
        .map(|(row, k)| row.iter().map(|v| v / k).collect())
        .collect();
    let sol = &run.solution;
    let derived = Derived {
        c_mc,
        pi,
        pi_bar,
        b_hat,
        c_solver,
        profile_solver,
        profile_mc,
        mu: sol.mu,
        alpha: sol.alpha,
        delta: sol.delta,
    };
    Ok((derived, run))
}

/// Full-sample value with the spread of the batch values as its error.
fn batch_estimate(full: f64, batches: impl Iterator<Item = f64>, n_samples: u64) -> McEstimate {
    let v: Vec<f64> = batches.collect();
    let b = v.len() as f64;
    if v.len() < 2 {
        return McEstimate { mean: full, stderr: f64::NAN, n_samples };
    }
    let mean = v.iter().sum::<f64>() / b;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (b - 1.0);
    McEstimate { mean: full, stderr: (var / b).sqrt(), n_samples }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub n: usize,
    pub k: f64,
    pub solver: f64,
    pub mc: McEstimate,
    pub z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub params: SawParams,
    pub n_max: usize,
    pub n_batches: usize,
    pub k_nodes: Vec<f64>,
    /// `c_n^SAW`, `n = 1..=n_max`.
    pub c_mc: Vec<McEstimate>,
    /// `c_n` from the solver fed with the estimated kernels.
    pub c_solver: Vec<f64>,
    /// `c_n^solver − c_n^SAW` with its batch error.
    pub c_diff: Vec<McEstimate>,
    pub z_c: Vec<f64>,
    pub pi: Vec<McEstimate>,
    pub pi_bar: Vec<McEstimate>,
    /// `B̂_m(k)`, `[m][k-node]`.
    pub b_hat: Vec<Vec<McEstimate>>,
    /// Normalized frequency profiles, solver against weighted paths.
    pub profiles: Vec<ProfilePoint>,
    pub mu: f64,
    pub alpha: f64,
    pub delta_hat: McEstimate,
}

impl CrossCheckReport {
    pub fn max_abs_z_c(&self) -> f64 {
        self.z_c.iter().fold(0.0, |a, z| a.max(z.abs()))
    }

    pub fn max_abs_z_profile(&self) -> f64 {
        self.profiles.iter().fold(0.0, |a, p| a.max(p.z.abs()))
    }
}

/// Estimates `c_m`, `π_m`, `π̄_m` and `Π̂_m` on one set of paths, builds
/// `B̂_m = Π̂_m / (λ c_m)`, runs the solver on them and compares its `c_n` and
/// normalized profiles with the direct path averages. Errors come from
/// `n_batches` contiguous batches, each re-running the whole pipeline.
pub fn cross_check_recursion(params: &SawParams, cfg: &CrossCheckConfig, exec: Exec) -> Result<CrossCheckReport> {
    params.validate()?;
    let n_max = cfg.n_max;
    if n_max == 0 || n_max > PI_MAX_M {
        return Err(Error::TooLarge(format!("cross-check needs 1 <= n_max <= {PI_MAX_M}, got {n_max}")));
    }
    if cfg.n_batches < 2 || (cfg.n_batches as u64) > params.n_samples {
        return Err(Error::InvalidParameter(format!(
            "need 2 <= n_batches <= n_samples, got {} batches",
            cfg.n_batches
        )));
    }
    let params = params.with_n(n_max);
    let eval = JEvaluator::new(n_max)?;
    let nodes = cfg.grid.nodes();
    let (d, lambda, total) = (params.d, params.lambda, params.n_samples);
    let n_batches = cfg.n_batches as u64;

    let batches: Vec<BatchSums> = exec.map(cfg.n_batches, |b| {
        let (lo, hi) = (total * b as u64 / n_batches, total * (b as u64 + 1) / n_batches);
        let mut s = BatchSums::new(n_max, nodes.len());
        for idx in lo..hi {
            let path = sample_path(&params, idx);
            let contacts = Contacts::new(&path, params.rho);
            s.n += 1;
            for m in 1..=n_max {
                let r = path.point(m).iter().map(|x| x * x).sum::<f64>().sqrt();
                let kw = if lambda == 0.0 { 1.0 } else { k_from(&contacts, 0, m, lambda) };
                s.k[m - 1] += kw;
                for (acc, &k) in s.profile[m - 1].iter_mut().zip(nodes) {
                    *acc += kw * omega_unchecked(d, k * r);
                }
                if lambda == 0.0 {
                    continue;
                }
                let j = eval.j(&contacts, 0, m, lambda);
                if j == 0.0 {
                    continue;
                }
                s.pi[m - 1] += j;
                s.pi_bar[m - 1] += j * r * r;
                for (acc, &k) in s.pi_hat[m - 1].iter_mut().zip(nodes) {
                    *acc += j * omega_unchecked(d, k * r);
                }
            }
        }
        s
    });
    let mut all = BatchSums::new(n_max, nodes.len());
    for b in &batches {
        all.merge(b);
    }
    let (full, _) = derive(&all, &params, cfg)?;
    let per_batch: Vec<Derived> = exec
        .map(batches.len(), |i| derive(&batches[i], &params, cfg).map(|x| x.0))
        .into_iter()
        .collect::<Result<_>>()?;

    let est = |f: &dyn Fn(&Derived) -> f64| batch_estimate(f(&full), per_batch.iter().map(f), total);
    let c_mc: Vec<McEstimate> = (0..n_max).map(|i| est(&|x| x.c_mc[i])).collect();
    let c_diff: Vec<McEstimate> = (0..n_max).map(|i| est(&|x| x.c_solver[i] - x.c_mc[i])).collect();
    let z_c = c_diff.iter().map(z_floored).collect();
    let pi = (0..n_max).map(|i| est(&|x| x.pi[i])).collect();
    let pi_bar = (0..n_max).map(|i| est(&|x| x.pi_bar[i])).collect();
    let b_hat = (0..n_max)
        .map(|m| (0..nodes.len()).map(|j| est(&|x| x.b_hat[m][j])).collect())
        .collect();
    let mut profiles = Vec::with_capacity(n_max * nodes.len());
    for m in 0..n_max {
        for (j, &k) in nodes.iter().enumerate() {
            let diff = est(&|x| x.profile_mc[m][j] - x.profile_solver[m][j]);
            let mc = est(&|x| x.profile_mc[m][j]);
            profiles.push(ProfilePoint { n: m + 1, k, solver: full.profile_solver[m][j], mc, z: z_floored(&diff) });
        }
    }
    Ok(CrossCheckReport {
        params,
        n_max,
        n_batches: cfg.n_batches,
        k_nodes: nodes.to_vec(),
        c_mc,
        c_solver: full.c_solver.clone(),
        c_diff,
        z_c,
        pi,
        pi_bar,
        b_hat,
        profiles,
        mu: full.mu,
        alpha: full.alpha,
        delta_hat: est(&|x| x.delta),
    })
}

/// `|B̂_m(k)| ≤ K Γ̂_m(k)` on the frequency grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominationReport {
    pub k_cut: f64,
    /// Largest `m` used to fit `K`.
    pub fit_m: usize,
    pub k_fitted: f64,
    /// Per `m`, the largest `(|B̂_m(k)| − K Γ̂_m(k)) / stderr` over `k ≤ k_cut`.
    pub worst_excess: Vec<f64>,
    pub passes: bool,
}

/// Fits `K = max |B̂_m(k)| / Γ̂_m(k)` over `m ≤ fit_m`, `k ≤ k_cut`, then
/// checks every `m` in the report against `K Γ̂_m + 3σ`, with `Γ` the SAW
/// majorant at unit prefactor.
pub fn gamma_domination(report: &CrossCheckReport, fit_m: usize, k_cut: f64) -> Result<DominationReport> {
    if fit_m == 0 || fit_m > report.n_max {
        return Err(Error::InvalidParameter(format!("fit_m must lie in 1..={}", report.n_max)));
    }
    let unit = MajorantFamily::saw(1.0, report.params.d)?;
    let gamma_hat: Vec<Vec<f64>> = (1..=report.n_max)
        .map(|m| {
            let g = unit.gamma(m);
            report.k_nodes.iter().map(|&k| g.hat(k)).collect()
        })
        .collect();
    let keep: Vec<usize> = (0..report.k_nodes.len()).filter(|&j| report.k_nodes[j] <= k_cut).collect();
    let mut k_fitted = 0.0f64;
    for m in 0..fit_m {
        for &j in &keep {
            k_fitted = k_fitted.max(report.b_hat[m][j].mean.abs() / gamma_hat[m][j]);
        }
    }
    let worst_excess: Vec<f64> = (0..report.n_max)
        .map(|m| {
            keep.iter()
                .map(|&j| {
                    let e = report.b_hat[m][j];
                    (e.mean.abs() - k_fitted * gamma_hat[m][j]) / e.stderr
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    let passes = worst_excess.iter().all(|w| *w <= 3.0);
    Ok(DominationReport { k_cut, fit_m, k_fitted, worst_excess, passes })
}
