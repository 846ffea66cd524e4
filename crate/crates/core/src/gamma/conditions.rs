//! Empirical constants for the four conditions on a majorant sequence.

use serde::{Deserialize, Serialize};

use super::majorant::{default_radius_grid, geometric_grid, MajorantFamily};
use super::mixture::ln_gaussian_density;
use super::series::{partial_sum_trend, PartialSumTrend};
use crate::{Error, Result};

/// Largest `m` (and `n`) used when fitting and verifying the χ constant.
const CHI_FIT_MAX: usize = 16;
/// Radii in the dense grid on which the fitted χ is re-verified.
const CHI_VERIFY_POINTS: usize = 256;
/// Allowed excess on the dense grid over the fit made on the coarse one.
const CHI_VERIFY_SLACK: f64 = 1.01;
/// A sup over the upper half of the index range may exceed the lower-half sup by this factor.
const STABILITY_SLACK: f64 = 1.1;
const B3_T_FACTORS: [f64; 5] = [1.0, 1.5, 2.0, 4.0, 8.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    B1,
    B2,
    B3,
    B4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: Condition,
    pub detail: String,
}

/// Trend diagnostics behind each reported constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionTails {
    /// B1 sums at `n_max/4`, `n_max/2`, `n_max`.
    pub k1: PartialSumTrend,
    /// Fitted χ constant (1 for the power law).
    pub chi_constant: f64,
    /// Largest pointwise excess of `Γ_m Γ_n / (χ Γ_{m+n})` seen in verification.
    pub chi_domination_sup: f64,
    /// B2 sup over the lower and upper halves of the index range.
    pub k2_halves: [f64; 2],
    /// B3 sup over the lower and upper halves of the sampled `m`.
    pub k3_halves: [f64; 2],
    /// Horizon of the B4 partial sums.
    pub b4_horizon: usize,
    pub k4: PartialSumTrend,
    pub k5: PartialSumTrend,
    pub k6: PartialSumTrend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub family: MajorantFamily,
    pub n_max: usize,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub k5: f64,
    pub k6: f64,
    pub violations: Vec<Violation>,
    pub tails: ConditionTails,
}

impl ConditionReport {
    pub fn passes(&self, condition: Condition) -> bool {
        !self.violations.iter().any(|v| v.condition == condition)
    }

    pub fn all_pass(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn constants(&self) -> [f64; 6] {
        [self.k1, self.k2, self.k3, self.k4, self.k5, self.k6]
    }
}

pub fn condition_report(family: &MajorantFamily, n_max: usize) -> Result<ConditionReport> {
    if n_max < 4 {
        return Err(Error::InvalidParameter(format!("condition report needs n_max >= 4, got {n_max}")));
    }
    let mut violations = Vec::new();
    let mut flag = |condition, detail: String| violations.push(Violation { condition, detail });
    let radii = default_radius_grid(n_max);

    // B1
    let chi = family.chi(CHI_FIT_MAX.min(n_max / 2).max(1), &radii);
    let b1_sum = |n: usize| -> f64 {
        (1..n).map(|s| s.min(n - s) as f64 * chi.value(s, n - s)).sum()
    };
    let b1_values: Vec<f64> = (2..=n_max).map(b1_sum).collect();
    let k1 = b1_values.iter().copied().fold(0.0, f64::max);
    let (k1_half, k1_full) = (b1_sum(n_max / 2), b1_sum(n_max));
    let k1_trend = partial_sum_trend(b1_sum(n_max / 4), k1_half, k1_full);
    // Sums that decrease towards their limit are bounded regardless of the increment ratio.
    if !k1_trend.bounded && k1_full > k1_half {
        flag(Condition::B1, format!("B1 sums keep growing (increment ratio {:.3})", k1_trend.increment_ratio));
    }
    let verify_max = CHI_FIT_MAX.min(n_max / 2).max(1);
    let dense = geometric_grid(radii[0], *radii.last().unwrap(), CHI_VERIFY_POINTS);
    let gammas: Vec<_> = (1..=2 * verify_max).map(|m| family.gamma(m)).collect();
    let gamma = |m: usize| &gammas[m - 1];
    let mut chi_sup = 0.0f64;
    for m in 1..=verify_max {
        for n in m..=verify_max {
            let conv = gamma(m).convolve(gamma(n));
            let target = gamma(m + n);
            let scale = chi.value(m, n);
            for &r in &dense {
                chi_sup = chi_sup.max((conv.ln_eval(r) - target.ln_eval(r)).exp() / scale);
            }
        }
    }
    if !(chi_sup <= CHI_VERIFY_SLACK) {
        flag(Condition::B1, format!("Γ_m Γ_n exceeds χ Γ_(m+n) by factor {chi_sup:.6}"));
    }

    // B2: Γ_s ≤ K₂ Γ_u for u/2 ≤ s ≤ u, u = 2t ranging over 1..=n_max.
    let ln_table: Vec<Vec<f64>> = (1..=n_max)
        .map(|m| {
            let g = family.gamma(m);
            radii.iter().map(|&r| g.ln_eval(r)).collect()
        })
        .collect();
    let mut k2_halves = [0.0f64; 2];
    for u in 1..=n_max {
        let half = usize::from(u > n_max / 2);
        for s in u.div_ceil(2)..=u {
            for (ls, lu) in ln_table[s - 1].iter().zip(&ln_table[u - 1]) {
                k2_halves[half] = k2_halves[half].max((ls - lu).exp());
            }
        }
    }
    let k2 = k2_halves[0].max(k2_halves[1]);
    if !k2.is_finite() || k2_halves[1] > STABILITY_SLACK * k2_halves[0] {
        flag(Condition::B2, format!("B2 ratio grows with the index: halves {k2_halves:?}"));
    }

    // B3
    let ms = b3_indices(n_max);
    let x_grid = geometric_grid(1e-2, 8.0, 32);
    let d = family.dim;
    let df = d as f64;
    let mut k3_halves = [0.0f64; 2];
    for &m in &ms {
        let half = usize::from(m > n_max / 2);
        let g = family.gamma(m);
        let mf = m as f64;
        for &tf in &B3_T_FACTORS {
            let t = tf * mf;
            let scale = (t + mf).sqrt();
            for k in 0..=2u32 {
                let gk = family.gamma_moment(m, k);
                for &xs in &x_grid {
                    let x = xs * scale;
                    let ln_ref = ln_gaussian_density(d, t + mf, x);
                    let lhs: f64 = g
                        .terms()
                        .iter()
                        .map(|term| {
                            let v = term.variance;
                            let tau = t * v / (t + v);
                            let shift = v / (t + v) * x;
                            let moment = shifted_moment(df, tau, shift * shift, k);
                            term.weight * moment * (ln_gaussian_density(d, t + v, x) - ln_ref).exp()
                        })
                        .sum();
                    k3_halves[half] = k3_halves[half].max(lhs / gk);
                }
            }
        }
    }
    let k3 = k3_halves[0].max(k3_halves[1]);
    if !k3.is_finite() || k3_halves[1] > STABILITY_SLACK * k3_halves[0] {
        flag(Condition::B3, format!("B3 ratio grows with m: halves {k3_halves:?}"));
    }

    // B4
    let horizon = (64 * n_max).max(4096);
    let table = family.moment_table(horizon);
    let partial = |weight: &dyn Fn(usize) -> f64, k: u32, upto: usize| -> f64 {
        (1..=upto).map(|n| weight(n) * table.get(n, k)).sum()
    };
    let trend = |weight: &dyn Fn(usize) -> f64, k: u32| {
        partial_sum_trend(
            partial(weight, k, horizon / 4),
            partial(weight, k, horizon / 2),
            partial(weight, k, horizon),
        )
    };
    let k4_trend = trend(&|n| n as f64, 0);
    let k5_trend = trend(&|_| 1.0, 1);
    let k6_trend = trend(&|n| 1.0 / n as f64, 2);
    for (name, tr) in [("Σ n γ⁽⁰⁾(n)", &k4_trend), ("Σ γ⁽¹⁾(n)", &k5_trend), ("Σ γ⁽²⁾(n)/n", &k6_trend)] {
        if !tr.bounded {
            flag(
                Condition::B4,
                format!("{name} partial sums grow without bound (increment ratio {:.3})", tr.increment_ratio),
            );
        }
    }

    Ok(ConditionReport {
        family: *family,
        n_max,
        k1,
        k2,
        k3,
        k4: k4_trend.extrapolated,
        k5: k5_trend.extrapolated,
        k6: k6_trend.extrapolated,
        violations,
        tails: ConditionTails {
            k1: k1_trend,
            chi_constant: chi.constant,
            chi_domination_sup: chi_sup,
            k2_halves,
            k3_halves,
            b4_horizon: horizon,
            k4: k4_trend,
            k5: k5_trend,
            k6: k6_trend,
        },
    })
}

/// All `m ≤ 16` plus powers of two up to `n_max`.
fn b3_indices(n_max: usize) -> Vec<usize> {
    let mut ms: Vec<usize> = (1..=n_max.min(16)).collect();
    let mut p = 32;
    while p <= n_max {
        ms.push(p);
        p *= 2;
    }
    if *ms.last().unwrap() != n_max {
        ms.push(n_max);
    }
    ms
}

/// `E|Y|^{2k}` for `Y ~ N(μ, τ I_d)` with `|μ|² = mu2`.
pub fn shifted_moment(d: f64, tau: f64, mu2: f64, k: u32) -> f64 {
    match k {
        0 => 1.0,
        1 => d * tau + mu2,
        2 => mu2 * mu2 + (2.0 * d + 4.0) * tau * mu2 + d * (d + 2.0) * tau * tau,
        _ => panic!("moment order {k} not supported"),
    }
}
