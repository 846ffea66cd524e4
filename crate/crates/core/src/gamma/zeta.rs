use serde::{Deserialize, Serialize};

use super::majorant::MajorantFamily;
use super::series::{suffix_sums, PowerTail};
use crate::{Error, Result};

/// Explicit summation horizon for tail sums, as a multiple of `n_max`.
const TAIL_HORIZON_FACTOR: usize = 64;
const MIN_TAIL_HORIZON: usize = 4096;

/// `ζ₁`, `ζ₂`, `ζ̄` for one majorant family on `1..=n_max`, plus the tail
/// sums `γ̄_n = Σ_{j≥n} γ_j` and `Σ_{k≥n} k γ_k`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZetaTable {
    n_max: usize,
    zeta1: Vec<f64>,
    zeta2: Vec<f64>,
    zeta_bar: Vec<f64>,
    gamma_bar: Vec<f64>,
    k_gamma_tail: Vec<f64>,
    /// Tail diagnostic for the `ζ₂` series.
    pub zeta2_tail: PowerTail,
    pub gamma_bar_tail: PowerTail,
    pub k_gamma_tail_diag: PowerTail,
}

impl ZetaTable {
    pub fn new(family: &MajorantFamily, n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidParameter("n_max must be >= 1".into()));
        }
        let horizon = (TAIL_HORIZON_FACTOR * n_max).max(MIN_TAIL_HORIZON);
        let table = family.moment_table(horizon);
        let (g0, g1, g2) = (table.column(0), table.column(1), table.column(2));

        let z2_terms: Vec<f64> = (0..=horizon).map(|m| g1[m] + m as f64 * g0[m]).collect();
        let (z2_all, zeta2_tail) = suffix_sums(&z2_terms);
        if !zeta2_tail.converges {
            return Err(Error::InvalidParameter(format!(
                "ζ₂ tail diverges (fitted exponent {:.3})",
                zeta2_tail.exponent
            )));
        }
        let (gbar_all, gamma_bar_tail) = suffix_sums(g0);
        let kg_terms: Vec<f64> = (0..=horizon).map(|m| m as f64 * g0[m]).collect();
        let (kg_all, k_gamma_tail_diag) = suffix_sums(&kg_terms);

        let mut zeta1 = vec![0.0; n_max + 1];
        let mut acc = 1.0;
        for m in 1..=n_max {
            let mf = m as f64;
            acc += mf * mf * g0[m] + mf * g1[m] + g2[m];
            zeta1[m] = acc;
        }
        zeta1[0] = 1.0;
        let zeta2: Vec<f64> = z2_all[..=n_max].to_vec();

        let mut zeta_bar = vec![0.0; n_max + 1];
        let (mut s1, mut s2) = (0.0, 0.0);
        for n in 1..=n_max {
            s1 += zeta1[n];
            s2 += zeta2[n];
            let nf = n as f64;
            zeta_bar[n] = s1 / (nf * nf) + s2 / nf;
        }
        Ok(ZetaTable {
            n_max,
            zeta1,
            zeta2,
            zeta_bar,
            gamma_bar: gbar_all[..=n_max].to_vec(),
            k_gamma_tail: kg_all[..=n_max].to_vec(),
            zeta2_tail,
            gamma_bar_tail,
            k_gamma_tail_diag,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `ζ₁(n) = 1 + Σ_{i=0}^{2} Σ_{m=1}^{n} m^{2-i} γ^{(i)}(m)`.
    pub fn zeta1(&self, n: usize) -> f64 {
        self.zeta1[n]
    }

    /// `ζ₂(n) = Σ_{m≥n} (γ^{(1)}(m) + m γ^{(0)}(m))`.
    pub fn zeta2(&self, n: usize) -> f64 {
        self.zeta2[n]
    }

    /// `ζ̄(n) = n^{-2} Σ_{j≤n} ζ₁(j) + n^{-1} Σ_{j≤n} ζ₂(j)`.
    pub fn zeta_bar(&self, n: usize) -> f64 {
        assert!(n >= 1);
        self.zeta_bar[n]
    }

    /// `γ̄_n = Σ_{j≥n} γ_j`.
    pub fn gamma_bar(&self, n: usize) -> f64 {
        self.gamma_bar[n]
    }

    /// `Σ_{k≥n} k γ_k`.
    pub fn k_gamma_tail(&self, n: usize) -> f64 {
        self.k_gamma_tail[n]
    }

    /// `sup_{n ≤ m ≤ 2n} ζ̄(m) / ζ̄(2n)` over `2n ≤ n_max`: the doubling
    /// constant of `ζ̄`.
    pub fn doubling_constant(&self) -> f64 {
        let mut sup = 0.0f64;
        for n in 1..=self.n_max / 2 {
            for m in n..=2 * n {
                sup = sup.max(self.zeta_bar[m] / self.zeta_bar[2 * n]);
            }
        }
        sup
    }
}

/// `r_n`: `n^{-1/2}` for `d = 5`, `n^{-1} log n` for `d = 6`, `n^{-1}` for `d ≥ 7`.
pub fn r_n(d: usize, n: usize) -> Result<f64> {
    if d < 5 {
        return Err(Error::InvalidParameter(format!("r_n is defined for d >= 5, got {d}")));
    }
    if n < 2 {
        return Err(Error::InvalidParameter(format!("r_n needs n >= 2, got {n}")));
    }
    let nf = n as f64;
    Ok(match d {
        5 => nf.powf(-0.5),
        6 => nf.ln() / nf,
        _ => 1.0 / nf,
    })
}
