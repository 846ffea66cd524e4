use serde::{Deserialize, Serialize};

use crate::lace::Path;
use crate::mc::{fill_standard_normal, sample_rng};
use crate::spectral::check_dimension;
use crate::{Error, Result};

/// Weakly self-avoiding Gaussian walk: `n` standard Gaussian steps in `R^d`,
/// each pair within distance `ρ` penalized by a factor `1 − λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SawParams {
    pub d: usize,
    pub lambda: f64,
    pub rho: f64,
    pub n: usize,
    pub seed: u64,
    pub n_samples: u64,
}

impl SawParams {
    pub fn validate(&self) -> Result<()> {
        check_dimension(self.d)?;
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::InvalidParameter(format!("λ must lie in [0, 1], got {}", self.lambda)));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::InvalidParameter(format!("ρ must lie in (0, 1], got {}", self.rho)));
        }
        if self.n == 0 || self.n_samples == 0 {
            return Err(Error::InvalidParameter("need n >= 1 and at least one sample".into()));
        }
        Ok(())
    }

    pub fn with_n(self, n: usize) -> Self {
        SawParams { n, ..self }
    }
}

/// Path number `index`: deterministic in `(seed, index)` alone.
pub fn sample_path(params: &SawParams, index: u64) -> Path {
    let mut rng = sample_rng(params.seed, index);
    let mut inc = vec![0.0; params.n * params.d];
    fill_standard_normal(&mut rng, &mut inc);
    Path::from_increments(params.d, &inc).expect("dimensions consistent")
}

/// The first `n_samples` paths, in index order.
pub fn sample_paths(params: &SawParams) -> Result<impl Iterator<Item = Path> + '_> {
    params.validate()?;
    Ok((0..params.n_samples).map(move |i| sample_path(params, i)))
}
