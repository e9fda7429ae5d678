//! Finite Fourier transform, two-frequency periodogram and the integrated
//! periodogram `U_n`.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::freq::{grid_frequency, wrap};
use crate::error::{invalid_arg, Result};
use crate::model::TimeSeries;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn forward_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

/// `F_n(λ) = Σ_{t=−n/2}^{n/2} X_t e^{−itλ}` by direct summation.
pub fn finite_fourier(x: &TimeSeries, lambda: f64) -> Complex64 {
    x.iter()
        .map(|(t, v)| v * Complex64::from_polar(1.0, -(t as f64) * lambda))
        .sum()
}

/// `F_n(offset + 2πj/N)` for `j = 0, …, N − 1` through one zero-padded FFT.
pub fn fourier_grid(x: &TimeSeries, offset: f64, grid: usize) -> Result<Vec<Complex64>> {
    if grid < x.len() {
        return invalid_arg(format!(
            "grid size {grid} must be at least n + 1 = {}",
            x.len()
        ));
    }
    let half = x.half_n() as f64;
    let mut buf = vec![Complex64::default(); grid];
    for (i, &v) in x.values().iter().enumerate() {
        buf[i] = v * Complex64::from_polar(1.0, -(i as f64) * offset);
    }
    forward_plan(grid).process(&mut buf);
    // slot i holds t = i − n/2, so e^{−itλ} = e^{iλn/2}·e^{−iλi}
    for (j, z) in buf.iter_mut().enumerate() {
        *z *= Complex64::from_polar(1.0, half * (offset + grid_frequency(j, grid)));
    }
    Ok(buf)
}

/// `I_n(λ, μ) = F_n(λ)·conj(F_n(μ)) / (2π(n+1))`.
pub fn periodogram(x: &TimeSeries, lambda: f64, mu: f64) -> Complex64 {
    finite_fourier(x, lambda) * finite_fourier(x, mu).conj() / (2.0 * PI * x.len() as f64)
}

/// `U_n(b) = (1/(n+1)) Σ_k X_k² e^{−ibk}` by direct summation.
pub fn integrated_periodogram(x: &TimeSeries, b: f64) -> Complex64 {
    x.iter()
        .map(|(t, v)| v * v * Complex64::from_polar(1.0, -(t as f64) * b))
        .sum::<Complex64>()
        / x.len() as f64
}

/// [`integrated_periodogram`] at many intercepts, in parallel.
pub fn integrated_periodogram_many(x: &TimeSeries, bs: &[f64]) -> Vec<Complex64> {
    bs.par_iter().map(|&b| integrated_periodogram(x, b)).collect()
}

/// `U_n` on the grid `b_j = 2πj/N`, `j = 0, …, N − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct UGrid {
    pub n: usize,
    pub values: Vec<Complex64>,
}

impl UGrid {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `2πj/N` in `[0, 2π)`.
    pub fn frequency(&self, j: usize) -> f64 {
        grid_frequency(j, self.len())
    }

    /// Grid point `j` wrapped to `(−π, π]`.
    pub fn intercept(&self, j: usize) -> f64 {
        wrap(self.frequency(j))
    }

    pub fn step(&self) -> f64 {
        2.0 * PI / self.len() as f64
    }

    /// Index of the grid point nearest to `b`.
    pub fn nearest_index(&self, b: f64) -> usize {
        let j = (b.rem_euclid(2.0 * PI) / self.step()).round() as usize;
        j % self.len()
    }
}

/// `U_n(2πj/N)` from the FFT of the zero-padded squared series.
pub fn u_grid(x: &TimeSeries, grid: usize) -> Result<UGrid> {
    let squared = TimeSeries::new(x.values().iter().map(|v| v * v).collect())?;
    let scale = 1.0 / x.len() as f64;
    let values = fourier_grid(&squared, 0.0, grid)?
        .into_iter()
        .map(|z| z * scale)
        .collect();
    Ok(UGrid { n: x.n(), values })
}
