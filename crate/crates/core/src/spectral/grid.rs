use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const DEFAULT_K_MAX: f64 = 12.0;
pub const DEFAULT_NODES: usize = 2048;
/// `exp(−t k_max²/2)` must fall below this for the truncation to be safe.
pub const DECAY_TOLERANCE: f64 = 1e-14;

/// Uniform frequency nodes on `[0, k_max]` with composite trapezoid weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl RadialGrid {
    /// `points ≥ 2` uniform nodes from 0 to `k_max`.
    pub fn uniform(k_max: f64, points: usize) -> Result<Self> {
        if !(k_max > 0.0 && k_max.is_finite()) || points < 2 {
            return Err(Error::InvalidParameter(format!(
                "grid needs k_max > 0 and at least 2 nodes (k_max={k_max}, nodes={points})"
            )));
        }
        let h = k_max / (points - 1) as f64;
        let nodes: Vec<f64> = (0..points).map(|i| i as f64 * h).collect();
        let mut weights = vec![h; points];
        weights[0] = h / 2.0;
        weights[points - 1] = h / 2.0;
        Ok(RadialGrid { nodes, weights })
    }

    /// Grid wide enough that `φ_t` with `t ≥ t_min` decays below the
    /// truncation tolerance; never narrower than the default.
    pub fn for_min_variance(t_min: f64) -> Result<Self> {
        if !(t_min > 0.0) {
            return Err(Error::InvalidParameter(format!("minimum variance must be > 0, got {t_min}")));
        }
        let needed = (-2.0 * (DECAY_TOLERANCE / 10.0).ln() / t_min).sqrt();
        let k_max = DEFAULT_K_MAX.max(needed);
        let points = ((DEFAULT_NODES - 1) as f64 * k_max / DEFAULT_K_MAX).ceil() as usize + 1;
        Self::uniform(k_max, points)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn k_max(&self) -> f64 {
        *self.nodes.last().expect("grid has nodes")
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self::uniform(DEFAULT_K_MAX, DEFAULT_NODES).expect("default grid is valid")
    }
}
