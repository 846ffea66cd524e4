//! TOML run configuration. Every section has defaults; unknown keys are
//! rejected. Command-line flags are applied on top of the file.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    #[serde(default)]
    pub family: FamilyConfig,
    #[serde(default)]
    pub seq: SeqConfig,
    #[serde(default)]
    pub clt: CltConfig,
    #[serde(default)]
    pub lace: LaceConfig,
    #[serde(default)]
    pub saw: SawConfig,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    PowerLaw,
    Saw,
}

/// `B_n = −Γ_n` for one of the majorant presets.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FamilyConfig {
    pub kind: FamilyKind,
    /// Decay exponent of the power-law family.
    pub a: f64,
    /// Prefactor of the SAW majorant.
    pub k: f64,
}

impl Default for FamilyConfig {
    fn default() -> Self {
        FamilyConfig { kind: FamilyKind::PowerLaw, a: 2.5, k: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeqConfig {
    pub d: usize,
    pub lambda: f64,
    pub n_max: usize,
    /// Number of terms used for μ, α and δ (at least `n_max`).
    pub horizon: usize,
}

impl Default for SeqConfig {
    fn default() -> Self {
        SeqConfig { d: 5, lambda: 0.02, n_max: 256, horizon: lacelab::solver::DEFAULT_SEQUENCE_HORIZON }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CltConfig {
    pub d: usize,
    pub lambda: f64,
    pub epsilon: f64,
    pub n_max: usize,
    pub n_list: Vec<usize>,
}

impl Default for CltConfig {
    fn default() -> Self {
        CltConfig { d: 5, lambda: 0.02, epsilon: 0.01, n_max: 64, n_list: vec![8, 16, 32, 64] }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LaceConfig {
    /// Number of bonds for `enumerate`; 0 lists laces of every size.
    pub n_bonds: usize,
    /// Interval length.
    pub n: usize,
    pub paths: u64,
    pub d: usize,
    pub lambdas: Vec<f64>,
    pub rho: f64,
}

impl Default for LaceConfig {
    fn default() -> Self {
        LaceConfig { n_bonds: 2, n: 5, paths: 100, d: 3, lambdas: vec![0.3, 1.0], rho: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SawConfig {
    pub d: usize,
    pub lambda: f64,
    pub rho: f64,
    pub n: usize,
    pub n_samples: u64,
    /// Largest `m` for `pi`; defaults to `min(n, 6)`.
    pub m_max: Option<usize>,
    pub k_max: f64,
    pub k_points: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub r_points: usize,
    pub bandwidth: Option<f64>,
    pub n_batches: usize,
    pub fit_m: usize,
    pub k_cut: f64,
}

impl Default for SawConfig {
    fn default() -> Self {
        SawConfig {
            d: 5,
            lambda: 0.1,
            rho: 1.0,
            n: 5,
            n_samples: 100_000,
            m_max: None,
            k_max: 8.0,
            k_points: 65,
            r_min: 0.5,
            r_max: 8.0,
            r_points: 32,
            bandwidth: None,
            n_batches: lacelab::saw::crosscheck::DEFAULT_BATCHES,
            fit_m: 3,
            k_cut: 3.0,
        }
    }
}

/// Copies every `Some` flag value over the matching config field.
macro_rules! apply {
    ($cfg:expr, $args:expr; $($field:ident),* $(,)?) => {
        $(if let Some(v) = $args.$field.clone() { $cfg.$field = v; })*
    };
}
pub(crate) use apply;
