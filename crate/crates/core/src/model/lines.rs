//! Theoretical line spectra.
//!
//! For the finite-order models in this crate every line density is a sum of
//! shifted trigonometric polynomials
//! `f_b(μ) = Σ_terms Σ_k d_k e^{ik(μ + s)}`, which makes values, second
//! derivatives, integrals and the lag coefficients
//! `c_b(h) = ∫ e^{ihλ} f_b(λ) dλ` all available in closed form.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::spectral::freq::{circular_distance, wrap};

/// Intercepts closer than this on the circle are the same line.
pub const INTERCEPT_TOL: f64 = 1e-12;

/// `Σ_k coeffs[k − min_k] · e^{ik(μ + shift)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigTerm {
    pub shift: f64,
    pub min_k: i64,
    pub coeffs: Vec<Complex64>,
}

impl TrigTerm {
    pub fn new(shift: f64, min_k: i64, coeffs: Vec<Complex64>) -> Self {
        Self {
            shift,
            min_k,
            coeffs,
        }
    }

    fn indexed(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (self.min_k + i as i64, c))
    }

    pub fn eval(&self, mu: f64) -> Complex64 {
        self.indexed()
            .map(|(k, c)| c * Complex64::from_polar(1.0, k as f64 * (mu + self.shift)))
            .sum()
    }

    pub fn second_derivative(&self, mu: f64) -> Complex64 {
        self.indexed()
            .map(|(k, c)| {
                -(k * k) as f64 * c * Complex64::from_polar(1.0, k as f64 * (mu + self.shift))
            })
            .sum()
    }

    fn coeff(&self, k: i64) -> Complex64 {
        let i = k - self.min_k;
        if i < 0 || i as usize >= self.coeffs.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[i as usize]
        }
    }

    fn max_abs_k(&self) -> i64 {
        self.indexed()
            .filter(|(_, c)| c.norm() > 0.0)
            .map(|(k, _)| k.abs())
            .max()
            .unwrap_or(0)
    }

    fn is_zero(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.norm() <= tol)
    }
}

/// Closed-form density on one support line.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LineDensity {
    pub terms: Vec<TrigTerm>,
}

impl LineDensity {
    pub fn eval(&self, mu: f64) -> Complex64 {
        self.terms.iter().map(|t| t.eval(mu)).sum()
    }

    pub fn second_derivative(&self, mu: f64) -> Complex64 {
        self.terms.iter().map(|t| t.second_derivative(mu)).sum()
    }

    /// `c_b(h) = ∫_{−π}^{π} e^{ihλ} f_b(λ) dλ`.
    pub fn lag_coefficient(&self, h: i64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| 2.0 * PI * t.coeff(-h) * Complex64::from_polar(1.0, -(h as f64) * t.shift))
            .sum()
    }

    /// `∫_{−π}^{π} f_b(μ) dμ`.
    pub fn integral(&self) -> Complex64 {
        self.lag_coefficient(0)
    }

    /// Largest lag with a possibly nonzero `c_b`.
    pub fn max_lag(&self) -> i64 {
        self.terms.iter().map(TrigTerm::max_abs_k).max().unwrap_or(0)
    }

    fn is_zero(&self, tol: f64) -> bool {
        self.terms.iter().all(|t| t.is_zero(tol))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLine {
    /// Intercept in `(−π, π]`.
    pub intercept: f64,
    pub density: LineDensity,
}

/// Densities of one line sampled on a uniform `μ` grid.
#[derive(Debug, Clone)]
pub struct SampledLine {
    pub intercept: f64,
    pub mu: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// The finite set of support lines of a model together with their densities.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LineSpectrum {
    lines: Vec<SpectralLine>,
}

impl LineSpectrum {
    /// Collects `(intercept, term)` contributions, merging terms whose
    /// intercepts coincide after wrapping and dropping identically zero lines.
    pub fn from_terms(terms: impl IntoIterator<Item = (f64, TrigTerm)>) -> Self {
        let mut lines: Vec<SpectralLine> = Vec::new();
        for (b, term) in terms {
            let b = wrap(b);
            match lines
                .iter_mut()
                .find(|l| circular_distance(l.intercept, b) <= INTERCEPT_TOL)
            {
                Some(line) => line.density.terms.push(term),
                None => lines.push(SpectralLine {
                    intercept: b,
                    density: LineDensity { terms: vec![term] },
                }),
            }
        }
        let scale = lines
            .iter()
            .flat_map(|l| l.density.terms.iter())
            .flat_map(|t| t.coeffs.iter())
            .map(|c| c.norm())
            .fold(0.0, f64::max);
        lines.retain(|l| !l.density.is_zero(1e-14 * scale.max(f64::MIN_POSITIVE)));
        lines.sort_by(|a, b| a.intercept.total_cmp(&b.intercept));
        Self { lines }
    }

    pub fn lines(&self) -> &[SpectralLine] {
        &self.lines
    }

    /// Number of lines, `q`.
    pub fn q(&self) -> usize {
        self.lines.len()
    }

    pub fn intercepts(&self) -> Vec<f64> {
        self.lines.iter().map(|l| l.intercept).collect()
    }

    pub fn line(&self, b: f64) -> Option<&SpectralLine> {
        let b = wrap(b);
        self.lines
            .iter()
            .find(|l| circular_distance(l.intercept, b) <= 1e-9)
    }

    /// `f_b(μ)`, zero when `b` carries no line.
    pub fn density(&self, b: f64, mu: f64) -> Complex64 {
        self.line(b)
            .map(|l| l.density.eval(mu))
            .unwrap_or_default()
    }

    /// `r_{s,t} = Σ_b e^{ibs} c_b(s − t)`.
    pub fn covariance(&self, s: i64, t: i64) -> Complex64 {
        self.lines
            .iter()
            .map(|l| {
                Complex64::from_polar(1.0, l.intercept * s as f64)
                    * l.density.lag_coefficient(s - t)
            })
            .sum()
    }

    pub fn max_lag(&self) -> i64 {
        self.lines
            .iter()
            .map(|l| l.density.max_lag())
            .max()
            .unwrap_or(0)
    }

    /// Every line sampled at `points` equally spaced `μ` in `(−π, π]`.
    pub fn sampled(&self, points: usize) -> Vec<SampledLine> {
        let mu: Vec<f64> = (1..=points)
            .map(|j| -PI + 2.0 * PI * j as f64 / points as f64)
            .collect();
        self.lines
            .iter()
            .map(|l| SampledLine {
                intercept: l.intercept,
                values: mu.iter().map(|&m| l.density.eval(m)).collect(),
                mu: mu.clone(),
            })
            .collect()
    }

    /// The covariance majorant `c(j) = max_b |c_b(j)|`.
    pub fn covariance_bound(&self) -> CovarianceBound {
        let lag = self.max_lag();
        let values: Vec<f64> = (-lag..=lag)
            .map(|j| {
                self.lines
                    .iter()
                    .map(|l| l.density.lag_coefficient(j).norm())
                    .fold(0.0, f64::max)
            })
            .collect();
        let sum = values.iter().sum();
        CovarianceBound {
            min_lag: -lag,
            values,
            sum,
        }
    }
}

/// A summable nonnegative majorant `c(j) ≥ |c_b(j)|` over all lines `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceBound {
    /// Lag of `values[0]`; `c(j) = 0` outside the stored range.
    pub min_lag: i64,
    pub values: Vec<f64>,
    /// `Σ_j c(j)`.
    pub sum: f64,
}

impl CovarianceBound {
    pub fn at(&self, j: i64) -> f64 {
        let i = j - self.min_lag;
        if i < 0 {
            return 0.0;
        }
        self.values.get(i as usize).copied().unwrap_or(0.0)
    }
}
