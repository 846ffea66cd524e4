//! Monte Carlo for the weakly self-avoiding Gaussian walk: `c_n`, the lace
//! kernels `Π_m`, endpoint densities, and the check of the convolution
//! recursion against the solver.

pub mod crosscheck;
pub mod estimators;
pub mod params;

pub use crosscheck::{cross_check_recursion, gamma_domination, CrossCheckConfig, CrossCheckReport, DominationReport, ProfilePoint};
pub use estimators::{
    default_bandwidth, saw_bound_shape, estimate_cn_all, estimate_cn_saw, estimate_endpoint_density, estimate_pi_hat,
    estimate_pi_moments, DensityEstimate, PI_MAX_M,
};
pub use params::{sample_path, sample_paths, SawParams};
