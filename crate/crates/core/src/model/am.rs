//! Mixtures of amplitude-modulated moving averages.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lines::{LineSpectrum, TrigTerm};
use super::rng::{standard_normal, stream_rng};
use super::series::{check_even, TimeSeries};
use crate::error::{Error, Result};

/// One modulated component `cos(w t)·Y_{t−τ}` with `Y` a Gaussian MA process
/// `Y_t = Σ_k ma[k]·ξ_{t−k}`, `var ξ = noise_var`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Carrier {
    /// Carrier frequency `w` in `[0, π]`.
    pub frequency: f64,
    #[serde(default)]
    pub delay: i64,
    pub ma: Vec<f64>,
    pub noise_var: f64,
}

impl Carrier {
    pub fn new(frequency: f64, ma: Vec<f64>, noise_var: f64) -> Self {
        Self {
            frequency,
            delay: 0,
            ma,
            noise_var,
        }
    }

    /// Autocovariance `γ(h)` of the modulator.
    pub fn autocovariance(&self, h: i64) -> f64 {
        let h = h.unsigned_abs() as usize;
        if h >= self.ma.len() {
            return 0.0;
        }
        self.noise_var * (0..self.ma.len() - h).map(|k| self.ma[k] * self.ma[k + h]).sum::<f64>()
    }

    pub fn order(&self) -> usize {
        self.ma.len().saturating_sub(1)
    }

    /// `f(μ + shift)` for the modulator spectral density
    /// `f(λ) = (1/2π) Σ_h γ(h) e^{−ihλ}`, scaled by `weight`.
    fn density_term(&self, shift: f64, weight: f64) -> TrigTerm {
        let m = self.order() as i64;
        let coeffs = (-m..=m)
            .map(|k| Complex64::new(weight * self.autocovariance(k) / (2.0 * PI), 0.0))
            .collect();
        TrigTerm::new(shift, -m, coeffs)
    }
}

/// `X_t = Σ_j cos(w_j t)·Y^{(j)}_{t−τ_j}` with independent modulators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmModelSpec {
    pub carriers: Vec<Carrier>,
}

impl AmModelSpec {
    pub fn new(carriers: Vec<Carrier>) -> Result<Self> {
        let spec = Self { carriers };
        spec.validate()?;
        Ok(spec)
    }

    /// Two carriers at `π/(4√3)` and `π/(3√2)` modulating unit-variance
    /// MA(1) processes with coefficients 0.5 and 0.3.
    pub fn two_carrier_ma1() -> Self {
        Self {
            carriers: vec![
                Carrier::new(PI / (4.0 * 3f64.sqrt()), vec![1.0, 0.5], 1.0),
                Carrier::new(PI / (3.0 * 2f64.sqrt()), vec![1.0, 0.3], 1.0),
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.carriers.is_empty() {
            return Err(Error::InvalidModel("AM model needs at least one carrier".into()));
        }
        for (j, c) in self.carriers.iter().enumerate() {
            if !(c.frequency.is_finite() && (0.0..=PI).contains(&c.frequency)) {
                return Err(Error::InvalidModel(format!(
                    "carrier {j}: frequency {} outside [0, π]",
                    c.frequency
                )));
            }
            if !(c.noise_var.is_finite() && c.noise_var > 0.0) {
                return Err(Error::InvalidModel(format!(
                    "carrier {j}: noise variance must be positive, got {}",
                    c.noise_var
                )));
            }
            if c.ma.is_empty() || c.ma.iter().any(|a| !a.is_finite()) {
                return Err(Error::InvalidModel(format!(
                    "carrier {j}: MA coefficients must be a non-empty list of finite values"
                )));
            }
        }
        Ok(())
    }

    /// Carrier `j` draws its innovations from ChaCha stream `j`.
    pub fn simulate(&self, n: usize, seed: u64) -> Result<TimeSeries> {
        self.validate()?;
        check_even(n)?;
        if n < 4 {
            return Err(Error::InvalidArgument(format!("n must be at least 4, got {n}")));
        }
        let half = (n / 2) as i64;
        let mut x = vec![0.0; n + 1];
        for (j, c) in self.carriers.iter().enumerate() {
            let m = c.order();
            let sd = c.noise_var.sqrt();
            let mut rng = stream_rng(seed, j as u64);
            // xi[i] is the innovation at time −n/2 − τ − m + i
            let xi: Vec<f64> = (0..n + 1 + m)
                .map(|_| sd * standard_normal(&mut rng))
                .collect();
            for (i, slot) in x.iter_mut().enumerate() {
                let t = i as i64 - half;
                let y: f64 = c.ma.iter().enumerate().map(|(k, a)| a * xi[i + m - k]).sum();
                *slot += (c.frequency * t as f64).cos() * y;
            }
        }
        TimeSeries::new(x)
    }

    pub fn covariance(&self, s: i64, t: i64) -> f64 {
        self.carriers
            .iter()
            .map(|c| {
                (c.frequency * s as f64).cos()
                    * (c.frequency * t as f64).cos()
                    * c.autocovariance(s - t)
            })
            .sum()
    }

    /// Largest lag with nonzero covariance.
    pub fn max_lag(&self) -> usize {
        self.carriers.iter().map(Carrier::order).max().unwrap_or(0)
    }

    /// Lines `0` and `±2w_j` with `f_0(μ) = ¼Σ_j [f_j(μ−w_j) + f_j(μ+w_j)]`,
    /// `f_{2w_j}(μ) = ¼f_j(μ+w_j)` and `f_{−2w_j}(μ) = ¼f_j(μ−w_j)`.
    pub fn theoretical_lines(&self) -> LineSpectrum {
        let mut terms = Vec::new();
        for c in &self.carriers {
            let w = c.frequency;
            terms.push((0.0, c.density_term(-w, 0.25)));
            terms.push((0.0, c.density_term(w, 0.25)));
            terms.push((2.0 * w, c.density_term(w, 0.25)));
            terms.push((-2.0 * w, c.density_term(-w, 0.25)));
        }
        LineSpectrum::from_terms(terms)
    }
}
