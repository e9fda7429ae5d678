//! Transforms and estimators on a single realization.

pub mod fourier;
pub mod freq;
pub mod kernels;
pub mod smoothing;

pub use fourier::{
    finite_fourier, fourier_grid, integrated_periodogram, integrated_periodogram_many,
    periodogram, u_grid, UGrid,
};
pub use freq::{circular_distance, wrap, wrap_mod_2pi, y_offset};
pub use kernels::{dirichlet, dirichlet_tilde, sinc_n};
pub use smoothing::{
    smoothed_line_estimate, uniform_eta_grid, Kernel, KernelShape, LineEstimate, LineSmoother,
    SampledKernel,
};
