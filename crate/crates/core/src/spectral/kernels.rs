//! Leakage kernels: the normalized sinc and the Dirichlet kernels.
//!
//! Removable singularities are evaluated from their Taylor series once the
//! relevant argument drops below [`SERIES_CUTOFF`].

use std::f64::consts::PI;

/// Below this argument magnitude the series expansion replaces the quotient.
pub const SERIES_CUTOFF: f64 = 1e-6;

/// `sin(((n+1)/2)·y) / (((n+1)/2)·y)`, equal to 1 at `y = 0`.
pub fn sinc_n(y: f64, n: usize) -> f64 {
    let x = 0.5 * (n as f64 + 1.0) * y;
    if x.abs() < SERIES_CUTOFF {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Dirichlet kernel `D_n(x) = sin(((n+1)/2)x) / sin(x/2)`.
///
/// At multiples of `2π` the limit `±(n+1)` is used. For even `n` the kernel
/// is `2π`-periodic and equals `Σ_{t=-n/2}^{n/2} e^{itx}`.
pub fn dirichlet(x: f64, n: usize) -> f64 {
    let a = 0.5 * (n as f64 + 1.0);
    let k = (x / (2.0 * PI)).round();
    let r = x - 2.0 * PI * k;
    // sin(a(2πk + r)) / sin(πk + r/2) = (−1)^{kn} sin(ar) / sin(r/2)
    let sign = if (k as i64 * n as i64).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    if r.abs() < SERIES_CUTOFF {
        sign * (n as f64 + 1.0) * (1.0 - (a * a - 0.25) * r * r / 6.0)
    } else {
        sign * (a * r).sin() / (0.5 * r).sin()
    }
}

/// Modified Dirichlet kernel `D̃_n(x) = sin(((n+1)/2)x) / (x/2)`, equal to
/// `(n+1)·sinc_n(x)`.
pub fn dirichlet_tilde(x: f64, n: usize) -> f64 {
    (n as f64 + 1.0) * sinc_n(x, n)
}
