//! Reference values for every estimator.
//!
//! Exact finite-`n` moments come from direct sums over the banded model
//! covariance; the Gaussian fourth moments use Isserlis' theorem. Next to
//! them sit the leading-order asymptotic formulas they are compared with.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid_arg, Result};
use crate::model::{check_even, LineSpectrum, ProcessModel, TimeSeries, WindowCovariance};
use crate::spectral::fourier::fourier_grid;
use crate::spectral::freq::{circular_distance, wrap};
use crate::spectral::kernels::{dirichlet, sinc_n};
use crate::spectral::smoothing::Kernel;

/// Largest sample size accepted by the exact double-sum oracles.
pub const MAX_EXACT_N: usize = 4096;

/// Exact Gaussian moments of periodogram statistics for one model and `n`.
#[derive(Debug, Clone)]
pub struct ExactMoments {
    cov: WindowCovariance,
}

impl ExactMoments {
    pub fn new(model: &ProcessModel, n: usize) -> Result<Self> {
        check_even(n)?;
        if n > MAX_EXACT_N {
            return invalid_arg(format!("exact oracles are capped at n = {MAX_EXACT_N}, got {n}"));
        }
        Ok(Self {
            cov: model.window_covariance(n)?,
        })
    }

    pub fn from_covariance(cov: WindowCovariance) -> Self {
        Self { cov }
    }

    pub fn n(&self) -> usize {
        self.cov.n()
    }

    pub fn covariance(&self) -> &WindowCovariance {
        &self.cov
    }

    fn half(&self) -> i64 {
        (self.n() / 2) as i64
    }

    /// `Σ_{s,t} g(r_{s,t}) e^{−isa + itb}`.
    fn bilinear(&self, a: f64, b: f64, g: impl Fn(f64) -> f64 + Sync) -> Complex64 {
        let half = self.half();
        (0..=self.cov.lag())
            .into_par_iter()
            .map(|h| {
                let diag = self.cov.diagonal(h);
                let hf = h as f64;
                // s = t + h: e^{−i(t+h)a + itb}; mirrored pair s = t, t' = t + h
                let lower = Complex64::from_polar(1.0, -hf * a);
                let upper = Complex64::from_polar(1.0, hf * b);
                let mut acc = Complex64::default();
                for (i, &r) in diag.iter().enumerate() {
                    let t = (i as i64 - half) as f64;
                    let v = g(r);
                    if v == 0.0 {
                        continue;
                    }
                    let phase = Complex64::from_polar(1.0, t * (b - a));
                    acc += if h == 0 {
                        v * phase
                    } else {
                        v * phase * (lower + upper)
                    };
                }
                acc
            })
            .sum()
    }

    fn norm(&self) -> f64 {
        2.0 * PI * (self.n() as f64 + 1.0)
    }

    /// `E I_n(λ, μ) = (1/(2π(n+1))) Σ_{s,t} r_{s,t} e^{−isλ + itμ}`.
    pub fn mean_periodogram(&self, lambda: f64, mu: f64) -> Complex64 {
        self.bilinear(lambda, mu, |r| r) / self.norm()
    }

    /// `cov(I_n(λ₁, μ₁), I_n(λ₂, μ₂)) = E[(I₁ − EI₁)·conj(I₂ − EI₂)]`.
    pub fn cov_periodogram(&self, l1: f64, m1: f64, l2: f64, m2: f64) -> Complex64 {
        // G(a, b) = E F(a)·conj F(b); E F(a)F(b) = G(a, −b) for real X
        let g = |a: f64, b: f64| self.bilinear(a, b, |r| r);
        let c = self.norm();
        (g(l1, l2) * g(m2, m1) + g(l1, -m2) * g(m1, -l2).conj()) / (c * c)
    }

    /// `E U_n(w) = (1/(n+1)) Σ_k r_{k,k} e^{−iwk}`.
    pub fn mean_un(&self, w: f64) -> Complex64 {
        let half = self.half();
        self.cov
            .diagonal(0)
            .iter()
            .enumerate()
            .map(|(i, &r)| r * Complex64::from_polar(1.0, -((i as i64 - half) as f64) * w))
            .sum::<Complex64>()
            / (self.n() as f64 + 1.0)
    }

    /// `E U_n(2πj/N)` for `j = 0, …, N − 1`.
    pub fn mean_un_grid(&self, grid: usize) -> Result<Vec<Complex64>> {
        let diag = TimeSeries::new(self.cov.diagonal(0).to_vec())?;
        let scale = 1.0 / (self.n() as f64 + 1.0);
        Ok(fourier_grid(&diag, 0.0, grid)?
            .into_iter()
            .map(|z| z * scale)
            .collect())
    }

    /// `cov(U_n(w), U_n(η)) = (2/(n+1)²) Σ_{j,k} r_{j,k}² e^{−ijw + ikη}`.
    pub fn cov_un(&self, w: f64, eta: f64) -> Complex64 {
        let m = self.n() as f64 + 1.0;
        2.0 * self.bilinear(w, eta, |r| r * r) / (m * m)
    }

    /// Exact mean of the periodogram along the line with intercept `b`.
    pub fn line_mean(&self, b: f64) -> ExactLineMean {
        let half = self.half();
        let lag = self.cov.lag() as i64;
        // C_h(b) = Σ_s r_{s,s−h} e^{−isb}
        let c = (-lag..=lag)
            .map(|h| {
                let diag = self.cov.diagonal(h.unsigned_abs() as usize);
                diag.iter()
                    .enumerate()
                    .map(|(i, &r)| {
                        let t = i as i64 - half;
                        let s = if h >= 0 { t + h } else { t };
                        r * Complex64::from_polar(1.0, -(s as f64) * b)
                    })
                    .sum()
            })
            .collect();
        ExactLineMean {
            b,
            n: self.n(),
            lag,
            c,
        }
    }
}

/// `μ ↦ E I_n(μ + b, μ)` in closed form.
#[derive(Debug, Clone)]
pub struct ExactLineMean {
    pub b: f64,
    pub n: usize,
    lag: i64,
    c: Vec<Complex64>,
}

impl ExactLineMean {
    /// `E I_n(μ + b, μ) = (1/(2π(n+1))) Σ_h e^{−ihμ} C_h(b)`.
    pub fn periodogram(&self, mu: f64) -> Complex64 {
        (-self.lag..=self.lag)
            .zip(&self.c)
            .map(|(h, &c)| c * Complex64::from_polar(1.0, -(h as f64) * mu))
            .sum::<Complex64>()
            / (2.0 * PI * (self.n as f64 + 1.0))
    }

    /// Exact `E f̂_b(η)` for the Fourier-grid Riemann sum.
    pub fn estimate(&self, kernel: &Kernel, eta: f64) -> Complex64 {
        let m = self.n + 1;
        let dmu = 2.0 * PI / m as f64;
        let reach = kernel.bandwidth * kernel.shape.support();
        (0..m)
            .filter_map(|j| {
                let mu = wrap(j as f64 * dmu);
                let d = wrap(mu - eta);
                (d.abs() <= reach).then(|| self.periodogram(mu) * kernel.scaled(d))
            })
            .sum::<Complex64>()
            * dmu
    }
}

/// [`ExactMoments::mean_periodogram`] for a one-off evaluation.
pub fn exact_mean_periodogram(
    model: &ProcessModel,
    lambda: f64,
    mu: f64,
    n: usize,
) -> Result<Complex64> {
    Ok(ExactMoments::new(model, n)?.mean_periodogram(lambda, mu))
}

/// [`ExactMoments::mean_un`] for a one-off evaluation.
pub fn exact_eun(model: &ProcessModel, w: f64, n: usize) -> Result<Complex64> {
    Ok(ExactMoments::new(model, n)?.mean_un(w))
}

/// [`ExactMoments::cov_un`] for a one-off evaluation.
pub fn exact_cov_un(model: &ProcessModel, w: f64, eta: f64, n: usize) -> Result<Complex64> {
    Ok(ExactMoments::new(model, n)?.cov_un(w, eta))
}

/// `E U_n(w) = Σ_b c_b(0)·D_n(b − w)/(n+1)`, the line-spectrum form of the
/// exact mean.
pub fn exact_eun_dirichlet(lines: &LineSpectrum, w: f64, n: usize) -> Complex64 {
    lines
        .lines()
        .iter()
        .map(|l| l.density.integral() * dirichlet(l.intercept - w, n))
        .sum::<Complex64>()
        / (n as f64 + 1.0)
}

/// `Σ_b f_b(μ)·sinc_n((b − w) mod 2π)` with `w = λ − μ`.
pub fn approx_mean_periodogram(lines: &LineSpectrum, lambda: f64, mu: f64, n: usize) -> Complex64 {
    let w = lambda - mu;
    lines
        .lines()
        .iter()
        .map(|l| l.density.eval(mu) * sinc_n(wrap(l.intercept - w), n))
        .sum()
}

/// `Σ_b c_b(0)·sinc_n((b − w) mod 2π)`, the leading-order `E U_n(w)`.
pub fn approx_eun(lines: &LineSpectrum, w: f64, n: usize) -> Complex64 {
    lines
        .lines()
        .iter()
        .map(|l| l.density.integral() * sinc_n(wrap(l.intercept - w), n))
        .sum()
}

/// Leading-order `cov(I_n(μ + w, μ), I_n(μ' + w', μ'))`:
/// `{Σ_b f_b(λ')s(y₁)}{Σ_b' f_b'(−μ')s(y₂)} + {Σ_b f_b(−μ')s(y₃)}{Σ_b' f_b'(λ')s(y₄)}`
/// with `λ = μ + w`, `λ' = μ' + w'` and
/// `y₁ = λ' + b − λ`, `y₂ = −μ' + μ + b'`, `y₃ = −μ' + b − λ`, `y₄ = λ' + μ + b'`.
pub fn approx_cov_periodogram(
    lines: &LineSpectrum,
    mu: f64,
    w: f64,
    mu_p: f64,
    w_p: f64,
    n: usize,
) -> Complex64 {
    let lambda = mu + w;
    let lambda_p = mu_p + w_p;
    let sum = |at: f64, y: &dyn Fn(f64) -> f64| -> Complex64 {
        lines
            .lines()
            .iter()
            .map(|l| l.density.eval(at) * sinc_n(wrap(y(l.intercept)), n))
            .sum()
    };
    let s1 = sum(lambda_p, &|b| lambda_p + b - lambda);
    let s2 = sum(-mu_p, &|b| -mu_p + mu + b);
    let s3 = sum(-mu_p, &|b| -mu_p + b - lambda);
    let s4 = sum(lambda_p, &|b| lambda_p + mu + b);
    s1 * s2 + s3 * s4
}

/// `f_b(η) + (b_n²/2)·f_b''(η)·∫x²K`; zero when `b` carries no line.
pub fn bias_curve(lines: &LineSpectrum, b: f64, eta: f64, kernel: &Kernel) -> Complex64 {
    match lines.line(b) {
        Some(l) => {
            l.density.eval(eta)
                + 0.5
                    * kernel.bandwidth.powi(2)
                    * l.density.second_derivative(eta)
                    * kernel.second_moment()
        }
        None => Complex64::default(),
    }
}

/// Tolerance on `x ≡ 0 (mod 2π)` in the indicator of [`variance_formula`].
pub const GAMMA_TOL: f64 = 1e-9;

/// `(2π/(n b_n))·[f_0(η + b) f_0(−η) + Σ_{b'} γ(−2η + b' − b)|f_{b'}(−η)|²]·∫K²`
/// with `γ(x) = 1` if `x ≡ 0 (mod 2π)` and 0 otherwise.
pub fn variance_formula(
    lines: &LineSpectrum,
    b: f64,
    eta: f64,
    kernel: &Kernel,
    n: usize,
) -> f64 {
    let f0 = |mu: f64| lines.density(0.0, mu).re;
    let mut bracket = f0(eta + b) * f0(-eta);
    for l in lines.lines() {
        if circular_distance(-2.0 * eta + l.intercept - b, 0.0) <= GAMMA_TOL {
            bracket += l.density.eval(-eta).norm_sqr();
        }
    }
    2.0 * PI / (n as f64 * kernel.bandwidth) * bracket * kernel.square_integral()
}

/// `2^{5/2}·q·Σ_j c(j)`, the almost-sure bound on
/// `limsup sup_w (n+1)|U_n(w) − EU_n(w)|/(n log n)^{1/2}`.
pub fn sup_deviation_bound(lines: &LineSpectrum) -> f64 {
    2f64.powf(2.5) * lines.q() as f64 * lines.covariance_bound().sum
}

/// `V_n(w) = (n+1)(U_n(w) − EU_n(w))`.
pub fn centered_statistic(u: Complex64, eu: Complex64, n: usize) -> Complex64 {
    (n as f64 + 1.0) * (u - eu)
}

/// One exact-versus-approximate comparison.
#[derive(Debug, Clone)]
pub struct MomentReport {
    pub quantity: String,
    pub n: usize,
    pub exact: Complex64,
    pub approx: Complex64,
    pub gap: f64,
    /// Order of the gap the comparison is expected to respect.
    pub claimed_order: String,
    /// Upper limit the gap is checked against.
    pub limit: f64,
    pub pass: bool,
}

impl MomentReport {
    pub fn new(
        quantity: impl Into<String>,
        n: usize,
        exact: Complex64,
        approx: Complex64,
        claimed_order: impl Into<String>,
        limit: f64,
    ) -> Self {
        let gap = (exact - approx).norm();
        Self {
            quantity: quantity.into(),
            n,
            exact,
            approx,
            gap,
            claimed_order: claimed_order.into(),
            limit,
            pass: gap <= limit,
        }
    }
}

/// Settings for [`oracle_check`].
#[derive(Debug, Clone)]
pub struct OracleCheckConfig {
    /// Allowed `C` in `gap ≤ C·log n/n` for the leading-order mean formulas.
    pub log_rate_constant: f64,
    /// Trial intercepts `w`.
    pub intercepts: Vec<f64>,
    /// Frequencies `μ` for the periodogram mean.
    pub frequencies: Vec<f64>,
}

impl Default for OracleCheckConfig {
    fn default() -> Self {
        Self {
            log_rate_constant: 1.0,
            intercepts: vec![0.0, 0.35, 0.9069, 1.481, 2.2],
            frequencies: vec![-1.0, 0.2, 0.7],
        }
    }
}

/// Compares exact moments against each other and against the asymptotic
/// formulas at sample size `n`.
pub fn oracle_check(
    model: &ProcessModel,
    n: usize,
    cfg: &OracleCheckConfig,
) -> Result<Vec<MomentReport>> {
    let exact = ExactMoments::new(model, n)?;
    let lines = model.theoretical_lines().ok();
    let log_rate = cfg.log_rate_constant * (n as f64).ln() / n as f64;
    let m = n + 1;
    let mut out = Vec::new();
    for &w in &cfg.intercepts {
        let eu = exact.mean_un(w);
        // Fourier-grid integral of E I_n(μ + w, μ)
        let line = exact.line_mean(w);
        let quad: Complex64 = (0..m)
            .map(|j| line.periodogram(2.0 * PI * j as f64 / m as f64))
            .sum::<Complex64>()
            * (2.0 * PI / m as f64);
        out.push(MomentReport::new(
            format!("EU_n quadrature w={w}"),
            n,
            eu,
            quad,
            "exact",
            1e-10 * eu.norm().max(1.0),
        ));
        let cw = exact.cov_un(w, w);
        out.push(MomentReport::new(
            format!("var U_n real w={w}"),
            n,
            cw,
            Complex64::new(cw.re.max(0.0), 0.0),
            "exact",
            1e-12 * cw.norm().max(1e-12),
        ));
        let herm = exact.cov_un(w, 0.5 * w + 0.3);
        let swapped = exact.cov_un(0.5 * w + 0.3, w).conj();
        out.push(MomentReport::new(
            format!("cov U_n hermitian w={w}"),
            n,
            herm,
            swapped,
            "exact",
            1e-12 * herm.norm().max(1e-12),
        ));
        if let Some(lines) = &lines {
            out.push(MomentReport::new(
                format!("EU_n dirichlet w={w}"),
                n,
                eu,
                exact_eun_dirichlet(lines, w, n),
                "exact",
                1e-12 * eu.norm().max(1.0),
            ));
            out.push(MomentReport::new(
                format!("EU_n sinc w={w}"),
                n,
                eu,
                approx_eun(lines, w, n),
                "log n / n",
                log_rate,
            ));
            for &mu in &cfg.frequencies {
                out.push(MomentReport::new(
                    format!("EI_n sinc w={w} mu={mu}"),
                    n,
                    line.periodogram(mu),
                    approx_mean_periodogram(lines, mu + w, mu, n),
                    "log n / n",
                    log_rate,
                ));
            }
        }
    }
    Ok(out)
}
