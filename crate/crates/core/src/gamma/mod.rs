//! Gaussian mixtures, majorant sequences and the quantities built from them.

pub mod conditions;
pub mod majorant;
pub mod mixture;
pub mod profiles;
pub mod series;
pub mod zeta;

pub use conditions::{condition_report, Condition, ConditionReport};
pub use majorant::{default_radius_grid, geometric_grid, Chi, MajorantFamily, MajorantKind};
pub use mixture::{gaussian_density, GaussianMixture, Term};
pub use profiles::{f_profile, kappa_profile, le_main_check, psi_n, PsiScale};
pub use series::PowerTail;
pub use zeta::{r_n, ZetaTable};
