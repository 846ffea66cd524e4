//! The convolution recursion in frequency space and its comparison with the
//! Gaussian limit `φ_{nδ}` and the bound `λ f_n`.

pub mod analysis;
pub mod family;
pub mod recursion;

pub use analysis::{
    bound_mixture, bound_profile, clt_error_at, clt_error_profile, delta_jj_check, delta_kj_check, delta_mixture, l1_error,
    profile_rows, ratio_profile, ratio_report, DensityRoute, ProfileRow,
};
pub use family::{BFamilySpec, BFamilySummary};
pub use recursion::{
    default_solver_radii, frequency_residual, run_recursion, RunSummary, SolverConfig, SolverRun,
    DEFAULT_EPSILON, DEFAULT_SEQUENCE_HORIZON,
};
