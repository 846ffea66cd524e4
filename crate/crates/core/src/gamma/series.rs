//! Tail estimates for positive series with power-law decaying terms.

use serde::{Deserialize, Serialize};

/// Estimate of `Σ_{m > M} t_m` from the last retained terms, assuming
/// `t_m ≈ t_M (m / M)^{-p}` beyond the cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTail {
    /// Fitted decay exponent `p` from `t_{M/2}` and `t_M`.
    pub exponent: f64,
    /// Estimated remainder; `+∞` when `p ≤ 1`.
    pub tail: f64,
    /// Magnitude of the last retained term.
    pub last_term: f64,
    pub converges: bool,
}

/// Exponents at or below this are treated as divergent (harmonic-like) tails.
const DIVERGENCE_EXPONENT: f64 = 1.05;

/// `terms[m]` for `m = 1..=M` (index 0 ignored).
pub fn extrapolate_tail(terms: &[f64]) -> PowerTail {
    let m = terms.len() - 1;
    assert!(m >= 2, "need at least two terms");
    let last = terms[m];
    let half = terms[m / 2];
    if last == 0.0 {
        return PowerTail { exponent: f64::INFINITY, tail: 0.0, last_term: 0.0, converges: true };
    }
    let exponent = -(last / half).ln() / ((m as f64) / ((m / 2) as f64)).ln();
    if !(exponent > DIVERGENCE_EXPONENT) {
        return PowerTail { exponent, tail: f64::INFINITY, last_term: last, converges: false };
    }
    // ∫_{M+1/2}^∞ t_M (x/M)^{-p} dx
    let mf = m as f64;
    let tail = last * mf.powf(exponent) * (mf + 0.5).powf(1.0 - exponent) / (exponent - 1.0);
    PowerTail { exponent, tail, last_term: last, converges: true }
}

/// Suffix sums `S_n = Σ_{m ≥ n} t_m` for `n = 1..=M`, completed with the
/// extrapolated tail. `S_0` is set equal to `S_1`.
pub fn suffix_sums(terms: &[f64]) -> (Vec<f64>, PowerTail) {
    let tail = extrapolate_tail(terms);
    let m = terms.len() - 1;
    let mut out = vec![0.0; m + 2];
    out[m + 1] = tail.tail;
    for n in (1..=m).rev() {
        out[n] = out[n + 1] + terms[n];
    }
    out[0] = out[1];
    out.truncate(m + 1);
    (out, tail)
}

/// Convergence verdict for a sequence of partial sums `S(N/4), S(N/2), S(N)`:
/// the increments must shrink geometrically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialSumTrend {
    pub value: f64,
    /// `(S(N) - S(N/2)) / (S(N/2) - S(N/4))`.
    pub increment_ratio: f64,
    /// Geometric extrapolation of the limit (`+∞` if not converging).
    pub extrapolated: f64,
    pub bounded: bool,
}

/// Increment ratios at or above this are read as unbounded growth.
const GROWTH_RATIO: f64 = 0.95;

pub fn partial_sum_trend(quarter: f64, half: f64, full: f64) -> PartialSumTrend {
    let d1 = half - quarter;
    let d2 = full - half;
    let ratio = if d1.abs() > 0.0 { d2 / d1 } else if d2.abs() > 0.0 { f64::INFINITY } else { 0.0 };
    let bounded = ratio.abs() < GROWTH_RATIO;
    let extrapolated = if bounded { full + d2 * ratio / (1.0 - ratio) } else { f64::INFINITY };
    PartialSumTrend { value: full, increment_ratio: ratio, extrapolated, bounded }
}
