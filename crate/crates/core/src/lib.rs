//! Numerical laboratory for convolution equations of lace-expansion type.
//!
//! The crate solves
//!
//! ```text
//! C_0 = δ_0,   C_n = C_{n-1} * φ + λ Σ_{k=1}^{n} c_k B_k * C_{n-k},   c_n = ∫ C_n,
//! ```
//!
//! for rotationally invariant kernels `B_k`, measures the local CLT error of
//! `C_n / c_n` against `φ_{nδ}`, and builds the lace-expansion machinery
//! for weakly self-avoiding Gaussian walks in continuous space.
//!
//! Modules:
//!
//! * [`sequence`]: scalar recursion for `c_n` and the normalization `μ`, `a_n`, `α`, `δ`.
//! * [`gamma`]: Gaussian mixtures, majorant families `Γ_n`, condition reports and bound profiles.
//! * [`spectral`]: radial Fourier transforms on `R^d` for odd `d`.
//! * [`solver`]: the convolution recursion in frequency space plus CLT error/bound analysis.
//! * [`lace`]: graphs, laces, compatible edges and the `K`/`J` weights on explicit paths.
//! * [`saw`]: Monte Carlo estimators for the weakly self-avoiding walk.
//!
//! Data-parallel loops go through [`exec`]; with the default `parallel`
//! feature they run on rayon, without it they run sequentially. Both paths
//! produce bit-identical results.

pub mod error;
pub mod exec;
pub mod gamma;
pub mod lace;
pub mod mc;
pub mod saw;
pub mod sequence;
pub mod solver;
pub mod spectral;

pub use error::{Error, Result};
pub use exec::Exec;
pub use gamma::{GaussianMixture, MajorantFamily};
pub use sequence::{BScalars, SequenceSolution};
pub use spectral::{RadialFn, RadialGrid};
