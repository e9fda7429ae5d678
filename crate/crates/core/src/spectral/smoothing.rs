//! Kernel-smoothed estimates of line spectral densities.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::fourier::fourier_grid;
use super::freq::wrap;
use crate::error::{Error, Result};
use crate::model::TimeSeries;

/// Piecewise-linear kernel through user-supplied knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledKernel {
    xs: Vec<f64>,
    ks: Vec<f64>,
}

impl SampledKernel {
    /// Knots must be strictly increasing and symmetric about 0, values
    /// nonnegative, symmetric and integrating to 1 within `1e-9`. The
    /// interpolant is taken as zero outside the knots, so the end values are
    /// jumps; they must not exceed `edge_tol`.
    pub fn new(xs: Vec<f64>, ks: Vec<f64>, edge_tol: f64) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidKernel(m));
        if xs.len() != ks.len() || xs.len() < 2 {
            return bad("need at least two knots with one value each".into());
        }
        if xs.iter().chain(&ks).any(|v| !v.is_finite()) {
            return bad("non-finite knot or value".into());
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return bad("knots must be strictly increasing".into());
        }
        if ks.iter().any(|&k| k < 0.0) {
            return bad("kernel values must be nonnegative".into());
        }
        let m = xs.len();
        let span = xs[m - 1] - xs[0];
        for i in 0..m {
            if (xs[i] + xs[m - 1 - i]).abs() > 1e-12 * span
                || (ks[i] - ks[m - 1 - i]).abs() > 1e-12 * ks[i].max(1.0)
            {
                return bad("kernel must be symmetric about 0".into());
            }
        }
        if ks[0] > edge_tol {
            return bad(format!(
                "kernel jumps by {} at its support edge (tolerance {edge_tol})",
                ks[0]
            ));
        }
        let s = Self { xs, ks };
        let mass = s.integrate(|_, k| k);
        if (mass - 1.0).abs() > 1e-9 {
            return bad(format!("kernel integrates to {mass}, not 1"));
        }
        Ok(s)
    }

    /// `∫ g(x, K(x)) dx` segment by segment with Simpson's rule, which is
    /// exact when `g` is a cubic polynomial on each segment.
    fn integrate(&self, g: impl Fn(f64, f64) -> f64) -> f64 {
        self.xs
            .windows(2)
            .zip(self.ks.windows(2))
            .map(|(x, k)| {
                let h = x[1] - x[0];
                let xm = 0.5 * (x[0] + x[1]);
                let km = 0.5 * (k[0] + k[1]);
                h / 6.0 * (g(x[0], k[0]) + 4.0 * g(xm, km) + g(x[1], k[1]))
            })
            .sum()
    }

    fn eval(&self, x: f64) -> f64 {
        let m = self.xs.len();
        if x < self.xs[0] || x > self.xs[m - 1] {
            return 0.0;
        }
        let i = self.xs.partition_point(|&k| k <= x).clamp(1, m - 1);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let t = (x - x0) / (x1 - x0);
        self.ks[i - 1] * (1.0 - t) + self.ks[i] * t
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ks)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelShape {
    /// `¾(1 − x²)` on `[−1, 1]`.
    Epanechnikov,
    /// `1 − |x|` on `[−1, 1]`.
    Triangular,
    /// `(4/3)(1 − 6x² + 6|x|³)` on `|x| ≤ ½`, `(8/3)(1 − |x|)³` on `½ ≤ |x| ≤ 1`.
    Parzen,
    Sampled(SampledKernel),
}

impl KernelShape {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Epanechnikov => "epanechnikov",
            Self::Triangular => "triangular",
            Self::Parzen => "parzen",
            Self::Sampled(_) => "sampled",
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let a = x.abs();
        match self {
            Self::Sampled(s) => s.eval(x),
            _ if a > 1.0 => 0.0,
            Self::Epanechnikov => 0.75 * (1.0 - a * a),
            Self::Triangular => 1.0 - a,
            Self::Parzen if a <= 0.5 => 4.0 / 3.0 * (1.0 - 6.0 * a * a + 6.0 * a * a * a),
            Self::Parzen => 8.0 / 3.0 * (1.0 - a).powi(3),
        }
    }

    /// `K` vanishes outside `[−s, s]`.
    pub fn support(&self) -> f64 {
        match self {
            Self::Sampled(s) => s.xs[s.xs.len() - 1],
            _ => 1.0,
        }
    }

    /// `(∫x²K, ∫K²)`.
    pub fn moments(&self) -> (f64, f64) {
        match self {
            Self::Epanechnikov => (0.2, 0.6),
            Self::Triangular => (1.0 / 6.0, 2.0 / 3.0),
            Self::Parzen => (1.0 / 12.0, 302.0 / 315.0),
            Self::Sampled(s) => (s.integrate(|x, k| x * x * k), s.integrate(|_, k| k * k)),
        }
    }
}

/// Weight `K` together with its bandwidth `b_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub shape: KernelShape,
    pub bandwidth: f64,
}

impl Kernel {
    /// Rejects `b_n ∉ (0, 1)` and scaled supports wider than `2π`.
    pub fn new(shape: KernelShape, bandwidth: f64) -> Result<Self> {
        if !(bandwidth.is_finite() && bandwidth > 0.0 && bandwidth < 1.0) {
            return Err(Error::InvalidKernel(format!(
                "bandwidth must lie in (0, 1), got {bandwidth}"
            )));
        }
        if 2.0 * bandwidth * shape.support() > 2.0 * PI {
            return Err(Error::InvalidKernel(format!(
                "scaled support {} exceeds 2π",
                2.0 * bandwidth * shape.support()
            )));
        }
        Ok(Self { shape, bandwidth })
    }

    pub fn epanechnikov(bandwidth: f64) -> Result<Self> {
        Self::new(KernelShape::Epanechnikov, bandwidth)
    }

    /// Bandwidth `n^{−1/5}`.
    pub fn default_bandwidth(n: usize) -> f64 {
        (n as f64).powf(-0.2)
    }

    /// Epanechnikov with bandwidth `n^{−1/5}`.
    pub fn default_for(n: usize) -> Result<Self> {
        Self::epanechnikov(Self::default_bandwidth(n))
    }

    /// `K_n(η) = K(η/b_n)/b_n`.
    pub fn scaled(&self, eta: f64) -> f64 {
        self.shape.eval(eta / self.bandwidth) / self.bandwidth
    }

    /// `(∫x²K, ∫K²)` of the unscaled kernel.
    pub fn moments(&self) -> (f64, f64) {
        self.shape.moments()
    }

    pub fn second_moment(&self) -> f64 {
        self.moments().0
    }

    pub fn square_integral(&self) -> f64 {
        self.moments().1
    }

    pub fn describe(&self) -> String {
        format!("{} b_n={:.6}", self.shape.name(), self.bandwidth)
    }
}

/// The products `I_n(μ_j + w, μ_j)` on the Fourier frequencies
/// `μ_j = 2πj/(n+1)`, ready to be smoothed at any `η`.
#[derive(Debug, Clone)]
pub struct LineSmoother {
    pub w: f64,
    pub n: usize,
    mu: Vec<f64>,
    products: Vec<Complex64>,
}

impl LineSmoother {
    pub fn new(x: &TimeSeries, w: f64) -> Result<Self> {
        let w = wrap(w);
        let m = x.len();
        let shifted = fourier_grid(x, w, m)?;
        let plain = fourier_grid(x, 0.0, m)?;
        let norm = 1.0 / (2.0 * PI * m as f64);
        let products = shifted
            .iter()
            .zip(&plain)
            .map(|(a, b)| a * b.conj() * norm)
            .collect();
        let mu = (0..m).map(|j| wrap(2.0 * PI * j as f64 / m as f64)).collect();
        Ok(Self {
            w,
            n: x.n(),
            mu,
            products,
        })
    }

    /// `(μ_j, I_n(μ_j + w, μ_j))`, `μ_j` wrapped to `(−π, π]`.
    pub fn periodogram_line(&self) -> impl Iterator<Item = (f64, Complex64)> + '_ {
        self.mu.iter().copied().zip(self.products.iter().copied())
    }

    /// `(2π/(n+1)) Σ_j I_n(μ_j + w, μ_j)·K_n(μ_j − η)`.
    pub fn estimate(&self, kernel: &Kernel, eta: f64) -> Complex64 {
        let dmu = 2.0 * PI / self.mu.len() as f64;
        let reach = kernel.bandwidth * kernel.shape.support();
        self.periodogram_line()
            .filter_map(|(mu, p)| {
                let d = wrap(mu - eta);
                (d.abs() <= reach).then(|| p * kernel.scaled(d))
            })
            .sum::<Complex64>()
            * dmu
    }
}

/// `f̂_w(η)` on a grid of `η`.
#[derive(Debug, Clone)]
pub struct LineEstimate {
    pub w: f64,
    pub n: usize,
    pub kernel: Kernel,
    pub eta: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// Riemann-sum approximation of `∫ I_n(μ + w, μ) K_n(μ − η) dμ` at every
/// `η` of `eta_grid`, each wrapped to `(−π, π]`.
pub fn smoothed_line_estimate(
    x: &TimeSeries,
    w: f64,
    kernel: &Kernel,
    eta_grid: &[f64],
) -> Result<LineEstimate> {
    if let Some(e) = eta_grid.iter().find(|e| !e.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite η {e}")));
    }
    let smoother = LineSmoother::new(x, w)?;
    let eta: Vec<f64> = eta_grid.iter().map(|&e| wrap(e)).collect();
    let values = eta.iter().map(|&e| smoother.estimate(kernel, e)).collect();
    Ok(LineEstimate {
        w: smoother.w,
        n: x.n(),
        kernel: kernel.clone(),
        eta,
        values,
    })
}

/// `count` equally spaced points covering `(−π, π]`.
pub fn uniform_eta_grid(count: usize) -> Vec<f64> {
    (1..=count)
        .map(|j| -PI + 2.0 * PI * j as f64 / count as f64)
        .collect()
}
