//! The scalar recursion `c_n = c_{n−1} + λ Σ_{k=1}^{n} c_k b_k c_{n−k}` and the
//! normalization `μ`, `a_n = μ^{-n} c_n`, `α`, `δ`.

use serde::{Deserialize, Serialize};

use crate::gamma::series::{extrapolate_tail, PowerTail};
use crate::{Error, Result};

pub const MU_TOLERANCE: f64 = 1e-14;
pub const MU_MAX_ITERATIONS: usize = 1000;
/// Smallest admissible `|μ^{-1} + λ Σ m a_m b_m|`.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-9;

/// Masses `b_n = ∫B_n` and second-moment coefficients `b̄_n = (1/d)∫|x|² B_n`,
/// `n = 1..=n_max`, stored with index 0 unused.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BScalars {
    pub lambda: f64,
    b: Vec<f64>,
    b_bar: Vec<f64>,
}

impl BScalars {
    /// `b[i]`, `b_bar[i]` hold `b_{i+1}`, `b̄_{i+1}`.
    pub fn new(lambda: f64, b: Vec<f64>, b_bar: Vec<f64>) -> Result<Self> {
        if !(lambda.is_finite() && (0.0..1.0).contains(&lambda)) {
            return Err(Error::InvalidParameter(format!("λ must lie in [0, 1), got {lambda}")));
        }
        if b.is_empty() || b.len() != b_bar.len() {
            return Err(Error::InvalidParameter(format!(
                "b and b̄ must be non-empty and of equal length ({} vs {})",
                b.len(),
                b_bar.len()
            )));
        }
        if b.iter().chain(&b_bar).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("b and b̄ must be finite".into()));
        }
        for (i, &bn) in b.iter().enumerate() {
            if lambda * bn.abs() >= 1.0 {
                return Err(Error::Unsolvable { n: i + 1, value: lambda * bn.abs() });
            }
        }
        let pad = |v: Vec<f64>| std::iter::once(0.0).chain(v).collect();
        Ok(BScalars { lambda, b: pad(b), b_bar: pad(b_bar) })
    }

    pub fn n_max(&self) -> usize {
        self.b.len() - 1
    }

    /// `b_n`, `1 ≤ n ≤ n_max`.
    pub fn b(&self, n: usize) -> f64 {
        self.b[n]
    }

    pub fn b_bar(&self, n: usize) -> f64 {
        self.b_bar[n]
    }

    /// Same data truncated at `n_max`.
    pub fn truncated(&self, n_max: usize) -> Result<Self> {
        if n_max == 0 || n_max > self.n_max() {
            return Err(Error::InvalidParameter(format!("cannot truncate {} terms to {n_max}", self.n_max())));
        }
        Ok(BScalars { lambda: self.lambda, b: self.b[..=n_max].to_vec(), b_bar: self.b_bar[..=n_max].to_vec() })
    }
}

/// Truncation estimate for one infinite series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailDiagnostic {
    /// `|t_{n_max}|`.
    pub last_term: f64,
    /// Extrapolated `Σ_{m > n_max} |t_m|` (the last term itself when too few terms).
    pub estimate: f64,
}

impl TailDiagnostic {
    fn of(terms: &[f64]) -> Self {
        let abs: Vec<f64> = terms.iter().map(|t| t.abs()).collect();
        let last_term = *abs.last().unwrap_or(&0.0);
        if abs.len() < 9 {
            return TailDiagnostic { last_term, estimate: last_term };
        }
        let PowerTail { tail, .. } = extrapolate_tail(&abs);
        TailDiagnostic { last_term, estimate: tail }
    }

    /// Bound used when comparing truncations.
    pub fn bound(&self) -> f64 {
        self.last_term.max(self.estimate)
    }
}

/// Scalars of the normalized recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceSolution {
    pub lambda: f64,
    /// `c_0 = 1, c_1, …, c_{n_max}`.
    pub c: Vec<f64>,
    /// `a_n = μ^{-n} c_n`.
    pub a: Vec<f64>,
    pub mu: f64,
    /// `a_{n_max}`.
    pub alpha: f64,
    /// `1` until [`compute_delta`] has been applied.
    pub delta: f64,
    /// `|μ^{-1} − 1 + λ Σ_{k ≤ n_max} a_k b_k|` at the fixed point.
    pub residual_mu: f64,
    /// Tail of `λ Σ a_k b_k` beyond `n_max`.
    pub mu_tail: TailDiagnostic,
    /// Tails of the numerator and denominator series of `δ`.
    pub delta_tail: Option<[TailDiagnostic; 2]>,
    pub iterations: usize,
    /// `1/2 ≤ a_n ≤ 3/2` for every `n` and the μ-iteration contracted.
    pub smallness_ok: bool,
}

impl SequenceSolution {
    pub fn n_max(&self) -> usize {
        self.c.len() - 1
    }

    /// `c_{n_max} / c_{n_max − 1}`, which tends to `μ`.
    pub fn ratio_limit(&self) -> f64 {
        let n = self.n_max();
        self.c[n] / self.c[n - 1]
    }
}

/// Solves `c_n (1 − λ b_n) = c_{n−1} + λ Σ_{k=1}^{n−1} c_k b_k c_{n−k}`.
pub fn solve_c(scalars: &BScalars) -> Result<Vec<f64>> {
    let n_max = scalars.n_max();
    let lambda = scalars.lambda;
    let mut c = vec![0.0; n_max + 1];
    c[0] = 1.0;
    for n in 1..=n_max {
        let mut rhs = c[n - 1];
        let mut conv = 0.0;
        for k in 1..n {
            conv += c[k] * scalars.b(k) * c[n - k];
        }
        rhs += lambda * conv;
        c[n] = rhs / (1.0 - lambda * scalars.b(n));
        if !c[n].is_finite() {
            return Err(Error::InvalidParameter(format!("c_{n} overflowed")));
        }
    }
    Ok(c)
}

/// `|c_n − c_{n−1} − λ Σ_{k=1}^{n} c_k b_k c_{n−k}| / max(1, |c_n|)`, maximized over `n`.
pub fn recursion_residual(c: &[f64], scalars: &BScalars) -> f64 {
    let mut worst = 0.0f64;
    for n in 1..c.len() {
        let conv: f64 = (1..=n).map(|k| c[k] * scalars.b(k) * c[n - k]).sum();
        let r = (c[n] - c[n - 1] - scalars.lambda * conv).abs() / c[n].abs().max(1.0);
        worst = worst.max(r);
    }
    worst
}

/// Self-consistent `μ^{-1} = 1 − λ Σ a_k b_k` starting from `μ = 1`.
pub fn normalize(c: &[f64], scalars: &BScalars) -> Result<SequenceSolution> {
    let n_max = scalars.n_max();
    if c.len() != n_max + 1 || c[0] != 1.0 {
        return Err(Error::InvalidParameter("c must hold c_0 = 1, …, c_{n_max}".into()));
    }
    let lambda = scalars.lambda;
    let normalized = |mu: f64| -> Vec<f64> {
        let inv = 1.0 / mu;
        let mut a = vec![1.0; n_max + 1];
        let mut p = 1.0;
        for n in 1..=n_max {
            p *= inv;
            a[n] = c[n] * p;
        }
        a
    };
    let interaction = |a: &[f64]| -> f64 { (1..=n_max).map(|k| a[k] * scalars.b(k)).sum() };

    let mut mu = 1.0;
    let mut iterations = 0;
    let mut last_step = f64::INFINITY;
    let mut converged = false;
    while iterations < MU_MAX_ITERATIONS {
        iterations += 1;
        let a = normalized(mu);
        let inv = 1.0 - lambda * interaction(&a);
        if !(inv > 0.0) || !inv.is_finite() {
            return Err(Error::NonConvergence { iterations, last_step: f64::INFINITY });
        }
        let next = 1.0 / inv;
        last_step = (next - mu).abs();
        mu = next;
        if last_step < MU_TOLERANCE {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence { iterations, last_step });
    }
    let a = normalized(mu);
    let terms: Vec<f64> = (1..=n_max).map(|k| lambda * a[k] * scalars.b(k)).collect();
    let residual_mu = (1.0 / mu - 1.0 + terms.iter().sum::<f64>()).abs();
    let smallness_ok = a.iter().all(|&v| (0.5..=1.5).contains(&v));
    Ok(SequenceSolution {
        lambda,
        alpha: a[n_max],
        c: c.to_vec(),
        a,
        mu,
        delta: 1.0,
        residual_mu,
        mu_tail: TailDiagnostic::of(&prepend_zero(&terms)),
        delta_tail: None,
        iterations,
        smallness_ok,
    })
}

fn prepend_zero(v: &[f64]) -> Vec<f64> {
    std::iter::once(0.0).chain(v.iter().copied()).collect()
}

/// `δ = (μ^{-1} + λ Σ a_m b̄_m) / (μ^{-1} + λ Σ m a_m b_m)`; stores truncation
/// diagnostics in `sol` and returns `δ`.
pub fn compute_delta(sol: &mut SequenceSolution, scalars: &BScalars) -> Result<f64> {
    let n_max = scalars.n_max();
    if sol.n_max() != n_max {
        return Err(Error::InvalidParameter("solution and scalars differ in n_max".into()));
    }
    let lambda = scalars.lambda;
    let num_terms: Vec<f64> = (1..=n_max).map(|m| lambda * sol.a[m] * scalars.b_bar(m)).collect();
    let den_terms: Vec<f64> = (1..=n_max).map(|m| lambda * m as f64 * sol.a[m] * scalars.b(m)).collect();
    let inv = 1.0 / sol.mu;
    let num = inv + num_terms.iter().sum::<f64>();
    let den = inv + den_terms.iter().sum::<f64>();
    if den.abs() < DEGENERATE_DENOMINATOR {
        return Err(Error::DegenerateDenominator(den));
    }
    sol.delta = num / den;
    sol.delta_tail = Some([TailDiagnostic::of(&prepend_zero(&num_terms)), TailDiagnostic::of(&prepend_zero(&den_terms))]);
    Ok(sol.delta)
}

/// `solve_c`, `normalize` and `compute_delta` in sequence.
pub fn solve(scalars: &BScalars) -> Result<SequenceSolution> {
    let c = solve_c(scalars)?;
    let mut sol = normalize(&c, scalars)?;
    compute_delta(&mut sol, scalars)?;
    Ok(sol)
}

/// Smallest `C` with `|a_{n+1} − a_n| ≤ C λ γ̄_n` for `1 ≤ n < n_max`, given
/// `gamma_bar[n] = Σ_{j ≥ n} γ_j`.
pub fn sequ3_constant(sol: &SequenceSolution, gamma_bar: &[f64], n_max: usize) -> f64 {
    fitted_constant(sol, n_max, |n| (sol.a[n + 1] - sol.a[n]).abs(), gamma_bar)
}

/// Smallest `C` with `|a_n − α| ≤ C λ Σ_{k ≥ n} k γ_k` for `1 ≤ n < n_max`;
/// `α` is taken from the (longer) solution `sol`.
pub fn alpha_constant(sol: &SequenceSolution, k_gamma_tail: &[f64], n_max: usize) -> f64 {
    fitted_constant(sol, n_max, |n| (sol.a[n] - sol.alpha).abs(), k_gamma_tail)
}

fn fitted_constant(sol: &SequenceSolution, n_max: usize, defect: impl Fn(usize) -> f64, scale: &[f64]) -> f64 {
    assert!(n_max < sol.a.len() && n_max < scale.len());
    if sol.lambda == 0.0 {
        return 0.0;
    }
    (1..n_max)
        .map(|n| defect(n) / (sol.lambda * scale[n]))
        .fold(0.0, f64::max)
}
