//! Spectral analysis for Gaussian harmonizable processes whose covariance is
//! almost periodic.
//!
//! Such processes carry spectral mass on finitely many lines `λ = μ + b`
//! parallel to the diagonal of the two-frequency plane. This crate
//!
//! * simulates amplitude-modulated mixtures and almost periodic MA / AR
//!   schemes together with their exact covariances and line spectra
//!   ([`model`]),
//! * computes the finite Fourier transform, the two-frequency periodogram,
//!   the integrated periodogram `U_n(b)` and kernel-smoothed line spectral
//!   estimates ([`spectral`]),
//! * locates the intercepts `b` from data through blockwise maxima of
//!   `|U_n|` ([`detect`]),
//! * provides exact finite-`n` moments and the leading-order asymptotic
//!   formulas they are compared against ([`oracle`]),
//! * runs seeded Monte Carlo experiments checking rates, bias, variance and
//!   normality ([`mc`]).

pub mod detect;
pub mod error;
pub mod io;
pub mod mc;
pub mod model;
pub mod oracle;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;
