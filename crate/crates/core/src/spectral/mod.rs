//! Radial Fourier analysis on `R^d` for odd `d`.

pub mod bessel;
pub mod grid;
pub mod transform;

pub use bessel::{bessel_j, check_dimension, omega_kernel};
pub use grid::RadialGrid;
pub use transform::{inverse_radial_transform, mixture_hat, sphere_area, RadialFn};
