use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// `λ |b_n| ≥ 1`: the implicit equation for `c_n` cannot be solved.
    #[error("recursion not solvable at n = {n}: lambda * |b_n| = {value} >= 1")]
    Unsolvable { n: usize, value: f64 },

    #[error("normalization did not converge after {iterations} iterations (last step {last_step:e})")]
    NonConvergence { iterations: usize, last_step: f64 },

    #[error("degenerate denominator {0:e} in diffusion constant")]
    DegenerateDenominator(f64),

    /// The transform would be truncated while the integrand is still significant.
    #[error("insufficient decay at k_max: |f(k_max)| / max|f| = {0:e}")]
    InsufficientDecay(f64),

    #[error("unsupported order or dimension: {0}")]
    Unsupported(String),

    #[error("graph is not connected on [{a}, {b}]")]
    Disconnected { a: u32, b: u32 },

    #[error("problem too large for exact evaluation: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
