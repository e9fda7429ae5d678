//! Angular frequency conventions.

use std::f64::consts::PI;

use crate::error::{invalid_arg, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Reduces `z` modulo `2π` onto the half-open interval `(−π, π]`.
///
/// The integer multiple removed is the `ℓ` with `−1/2 < z/2π − ℓ ≤ 1/2`.
/// Non-finite inputs are rejected.
pub fn wrap_mod_2pi(z: f64) -> Result<f64> {
    if !z.is_finite() {
        return invalid_arg(format!("cannot wrap non-finite frequency {z}"));
    }
    Ok(wrap(z))
}

/// Infallible variant of [`wrap_mod_2pi`] for values known to be finite.
#[inline]
pub fn wrap(z: f64) -> f64 {
    debug_assert!(z.is_finite());
    if z > -PI && z <= PI {
        return z;
    }
    let ell = (z / TWO_PI - 0.5).ceil();
    let mut w = z - ell * TWO_PI;
    // rounding in the subtraction can land a hair outside the interval
    if w <= -PI {
        w += TWO_PI;
    } else if w > PI {
        w -= TWO_PI;
    }
    w
}

/// Offset of an intercept `b` from a trial intercept `w`, `(b − w) mod 2π`.
#[inline]
pub fn y_offset(b: f64, w: f64) -> f64 {
    wrap(b - w)
}

/// Distance between two frequencies on the circle.
#[inline]
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap(a - b).abs()
}

/// `2πj/N`, the `j`-th point of an `N`-point grid on `[0, 2π)`.
#[inline]
pub fn grid_frequency(j: usize, grid: usize) -> f64 {
    TWO_PI * j as f64 / grid as f64
}
