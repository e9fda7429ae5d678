//! Moving-average and autoregressive schemes with almost periodic
//! coefficients.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lines::{LineSpectrum, TrigTerm, INTERCEPT_TOL};
use super::rng::{standard_normal, stream_rng};
use super::series::{check_even, TimeSeries};
use crate::error::{Error, Result};
use crate::spectral::freq::{circular_distance, wrap};

/// `α e^{iβn}` with `α = re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApTerm {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    #[serde(default)]
    pub beta: f64,
}

impl ApTerm {
    pub fn new(alpha: Complex64, beta: f64) -> Self {
        Self {
            re: alpha.re,
            im: alpha.im,
            beta,
        }
    }

    pub fn constant(a: f64) -> Self {
        Self {
            re: a,
            im: 0.0,
            beta: 0.0,
        }
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Finite almost periodic sequence `a(n) = Σ_l α_l e^{iβ_l n}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ApSequence {
    pub terms: Vec<ApTerm>,
}

impl ApSequence {
    pub fn new(terms: Vec<ApTerm>) -> Self {
        Self { terms }
    }

    pub fn constant(a: f64) -> Self {
        Self::new(vec![ApTerm::constant(a)])
    }

    /// `amplitude · cos(β n)` written as a conjugate pair.
    pub fn cosine(amplitude: f64, beta: f64) -> Self {
        Self::new(vec![
            ApTerm::new(Complex64::new(0.5 * amplitude, 0.0), beta),
            ApTerm::new(Complex64::new(0.5 * amplitude, 0.0), -beta),
        ])
    }

    pub fn eval(&self, n: i64) -> f64 {
        self.eval_complex(n).re
    }

    pub fn eval_complex(&self, n: i64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.alpha() * Complex64::from_polar(1.0, t.beta * n as f64))
            .sum()
    }

    /// `Σ_l |α_l|`.
    pub fn abs_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.alpha().norm()).sum()
    }

    /// Terms merged by wrapped frequency: `(β, Σ α)` with zero sums dropped.
    pub fn grouped(&self) -> Vec<(f64, Complex64)> {
        let mut groups: Vec<(f64, Complex64)> = Vec::new();
        for t in &self.terms {
            let beta = wrap(t.beta);
            match groups
                .iter_mut()
                .find(|(b, _)| circular_distance(*b, beta) <= INTERCEPT_TOL)
            {
                Some((_, a)) => *a += t.alpha(),
                None => groups.push((beta, t.alpha())),
            }
        }
        groups.retain(|(_, a)| a.norm() > 0.0);
        groups
    }

    /// Checks that every term is finite and the sequence is real at every
    /// integer `n`, i.e. the amplitude at `−β` is the conjugate of the one
    /// at `β`.
    pub fn validate_real(&self, what: &str) -> Result<()> {
        if self
            .terms
            .iter()
            .any(|t| !(t.re.is_finite() && t.im.is_finite() && t.beta.is_finite()))
        {
            return Err(Error::InvalidModel(format!("{what}: non-finite term")));
        }
        let groups = self.grouped();
        let scale = self.abs_sum().max(1.0);
        for &(beta, a) in &groups {
            let partner = groups
                .iter()
                .find(|(b, _)| circular_distance(*b, -beta) <= INTERCEPT_TOL)
                .map(|&(_, a)| a)
                .unwrap_or_default();
            if (partner - a.conj()).norm() > 1e-12 * scale {
                return Err(Error::InvalidModel(format!(
                    "{what}: term at β = {beta} lacks its conjugate partner at −β, so the \
                     sequence is not real-valued"
                )));
            }
        }
        Ok(())
    }
}

/// `X_t = Σ_{j=0}^{m} a_j(t)·ξ_{t−j}` with white Gaussian `ξ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApMaSpec {
    /// `a_0, …, a_m`.
    pub coeffs: Vec<ApSequence>,
    pub noise_var: f64,
}

impl ApMaSpec {
    pub fn new(coeffs: Vec<ApSequence>, noise_var: f64) -> Result<Self> {
        let spec = Self { coeffs, noise_var };
        spec.validate()?;
        Ok(spec)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.coeffs.is_empty() {
            return Err(Error::InvalidModel("MA scheme needs at least a_0".into()));
        }
        if !(self.noise_var.is_finite() && self.noise_var > 0.0) {
            return Err(Error::InvalidModel(format!(
                "noise variance must be positive, got {}",
                self.noise_var
            )));
        }
        for (j, a) in self.coeffs.iter().enumerate() {
            a.validate_real(&format!("coefficient a_{j}"))?;
        }
        Ok(())
    }

    pub fn simulate(&self, n: usize, seed: u64) -> Result<TimeSeries> {
        self.validate()?;
        check_even(n)?;
        if n < 4 {
            return Err(Error::InvalidArgument(format!("n must be at least 4, got {n}")));
        }
        let m = self.order();
        let half = (n / 2) as i64;
        let sd = self.noise_var.sqrt();
        let mut rng = stream_rng(seed, 0);
        // xi[i] is the innovation at time −n/2 − m + i
        let xi: Vec<f64> = (0..n + 1 + m)
            .map(|_| sd * standard_normal(&mut rng))
            .collect();
        let x = (0..=n)
            .map(|i| {
                let t = i as i64 - half;
                self.coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, a)| a.eval(t) * xi[i + m - j])
                    .sum()
            })
            .collect();
        TimeSeries::new(x)
    }

    /// `r_{s,t} = σ² Σ_j a_j(s)·a_{j−h}(t)` with `h = s − t`.
    pub fn covariance(&self, s: i64, t: i64) -> f64 {
        let h = s - t;
        let m = self.order() as i64;
        let lo = h.max(0);
        let hi = m.min(m + h);
        if lo > hi {
            return 0.0;
        }
        self.noise_var
            * (lo..=hi)
                .map(|j| self.coeffs[j as usize].eval(s) * self.coeffs[(j - h) as usize].eval(t))
                .sum::<f64>()
    }

    /// Lines `b = β − β'` with density `(σ²/2π)·A_β(ν)·conj(A_{β'}(ν))` at
    /// `ν = μ − β'`, where `A_β(ν) = Σ_j α_{jβ} e^{−ijν}`.
    pub fn theoretical_lines(&self) -> LineSpectrum {
        // amplitude polynomial per frequency: beta -> [α_{0β}, …, α_{mβ}]
        let m = self.order();
        let mut polys: Vec<(f64, Vec<Complex64>)> = Vec::new();
        for (j, seq) in self.coeffs.iter().enumerate() {
            for (beta, a) in seq.grouped() {
                let slot = match polys
                    .iter()
                    .position(|(b, _)| circular_distance(*b, beta) <= INTERCEPT_TOL)
                {
                    Some(p) => p,
                    None => {
                        polys.push((beta, vec![Complex64::default(); m + 1]));
                        polys.len() - 1
                    }
                };
                polys[slot].1[j] += a;
            }
        }
        let scale = self.noise_var / (2.0 * std::f64::consts::PI);
        let mut terms = Vec::new();
        for (beta, a) in &polys {
            for (beta_p, a_p) in &polys {
                // coefficient of e^{ikν}, k = j' − j ∈ [−m, m]
                let mut coeffs = vec![Complex64::default(); 2 * m + 1];
                for (j, &aj) in a.iter().enumerate() {
                    for (jp, &ajp) in a_p.iter().enumerate() {
                        coeffs[jp + m - j] += scale * aj * ajp.conj();
                    }
                }
                terms.push((beta - beta_p, TrigTerm::new(-beta_p, -(m as i64), coeffs)));
            }
        }
        LineSpectrum::from_terms(terms)
    }
}

/// `X_t = a_t·X_{t−1} + ξ_t`, started from zero `burn_in` steps before the
/// observation window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApArSpec {
    pub coeff: ApSequence,
    pub noise_var: f64,
    #[serde(default = "default_burn_in")]
    pub burn_in: usize,
}

fn default_burn_in() -> usize {
    500
}

/// Relative size below which products of AR coefficients are treated as 0.
const AR_TAIL: f64 = 1e-17;

impl ApArSpec {
    pub fn new(coeff: ApSequence, noise_var: f64, burn_in: usize) -> Result<Self> {
        let spec = Self {
            coeff,
            noise_var,
            burn_in,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.coeff.validate_real("AR coefficient")?;
        let rho = self.coeff.abs_sum();
        if rho >= 1.0 {
            return Err(Error::InvalidModel(format!(
                "AR coefficients must satisfy Σ|α| < 1, got {rho}"
            )));
        }
        if !(self.noise_var.is_finite() && self.noise_var > 0.0) {
            return Err(Error::InvalidModel(format!(
                "noise variance must be positive, got {}",
                self.noise_var
            )));
        }
        if self.burn_in < 100 {
            return Err(Error::InvalidModel(format!(
                "burn-in must be at least 100, got {}",
                self.burn_in
            )));
        }
        Ok(())
    }

    /// First time index of the recursion for sample size `n`.
    pub fn start(&self, n: usize) -> i64 {
        -((n / 2) as i64) - self.burn_in as i64
    }

    pub fn simulate(&self, n: usize, seed: u64) -> Result<TimeSeries> {
        self.validate()?;
        check_even(n)?;
        if n < 4 {
            return Err(Error::InvalidArgument(format!("n must be at least 4, got {n}")));
        }
        let sd = self.noise_var.sqrt();
        let mut rng = stream_rng(seed, 0);
        let t0 = self.start(n);
        let mut prev = 0.0;
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..(self.burn_in + n + 1) {
            let t = t0 + i as i64;
            let xi = standard_normal(&mut rng);
            prev = self.coeff.eval(t) * prev + sd * xi;
            if i >= self.burn_in {
                out.push(prev);
            }
        }
        TimeSeries::new(out)
    }

    /// Lag beyond which `Π a_k ≤ ρ^h` drops below `AR_TAIL`.
    pub fn effective_lag(&self) -> usize {
        let rho = self.coeff.abs_sum();
        if rho == 0.0 {
            0
        } else {
            (AR_TAIL.ln() / rho.ln()).ceil() as usize
        }
    }

    /// Variances `v_s = a_s² v_{s−1} + σ²` for `s = start, …, last`.
    pub(crate) fn variances(&self, start: i64, last: i64) -> Vec<f64> {
        let mut v = Vec::with_capacity((last - start + 1).max(0) as usize);
        let mut prev = 0.0;
        for s in start..=last {
            let a = self.coeff.eval(s);
            prev = a * a * prev + self.noise_var;
            v.push(prev);
        }
        v
    }

    /// Exact `r_{s,t}` for the recursion started at [`start`](Self::start)`(n)`;
    /// zero if either index precedes the start.
    pub fn covariance(&self, n: usize, s: i64, t: i64) -> f64 {
        let (s, t) = if s >= t { (s, t) } else { (t, s) };
        let t0 = self.start(n);
        if t < t0 {
            return 0.0;
        }
        let vt = *self.variances(t0, t).last().unwrap();
        let prod: f64 = (t + 1..=s).map(|k| self.coeff.eval(k)).product();
        prod * vt
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_valuedness_check() {
        assert!(ApSequence::cosine(0.5, 1.0).validate_real("a").is_ok());
        let lone = ApSequence::new(vec![ApTerm::new(Complex64::new(0.3, 0.0), 1.0)]);
        assert!(lone.validate_real("a").is_err());
        let complex_const = ApSequence::new(vec![ApTerm::new(Complex64::new(0.3, 0.1), 0.0)]);
        assert!(complex_const.validate_real("a").is_err());
        // β = π is its own mirror; a real amplitude is fine
        let alt = ApSequence::new(vec![ApTerm::new(Complex64::new(0.3, 0.0), std::f64::consts::PI)]);
        assert!(alt.validate_real("a").is_ok());
        let c = ApSequence::cosine(0.8, 0.7);
        for n in -5..5 {
            assert!((c.eval(n) - 0.8 * (0.7 * n as f64).cos()).abs() < 1e-15);
            assert!(c.eval_complex(n).im.abs() < 1e-15);
        }
    }

    #[test]
    fn white_noise_ma() {
        let spec = ApMaSpec::new(vec![ApSequence::constant(1.0)], 2.0).unwrap();
        assert_eq!(spec.covariance(3, 3), 2.0);
        assert_eq!(spec.covariance(3, 4), 0.0);
        let lines = spec.theoretical_lines();
        assert_eq!(lines.intercepts(), vec![0.0]);
        assert!((lines.density(0.0, 0.4).re - 1.0 / std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn ma_rejections() {
        assert!(ApMaSpec::new(vec![ApSequence::constant(1.0)], 0.0).is_err());
        assert!(ApMaSpec::new(vec![], 1.0).is_err());
    }

    #[test]
    fn ar_rejections() {
        assert!(ApArSpec::new(ApSequence::constant(1.0), 1.0, 200).is_err());
        assert!(ApArSpec::new(ApSequence::cosine(1.2, 0.3), 1.0, 200).is_err());
        assert!(ApArSpec::new(ApSequence::constant(0.5), 1.0, 10).is_err());
        assert!(ApArSpec::new(ApSequence::constant(0.5), 1.0, 100).is_ok());
    }

    #[test]
    fn zero_ar_is_noise() {
        let spec = ApArSpec::new(ApSequence::constant(0.0), 1.0, 100).unwrap();
        let x = spec.simulate(8, 2).unwrap();
        let mut rng = stream_rng(2, 0);
        let draws: Vec<f64> = (0..109).map(|_| standard_normal(&mut rng)).collect();
        assert_eq!(x.values(), &draws[100..]);
        assert_eq!(spec.effective_lag(), 0);
    }

    #[test]
    fn stationary_ar_covariance() {
        let spec = ApArSpec::new(ApSequence::constant(0.5), 1.0, 400).unwrap();
        let v = 1.0 / (1.0 - 0.25);
        assert!((spec.covariance(64, 0, 0) - v).abs() < 1e-12);
        assert!((spec.covariance(64, 3, 1) - 0.25 * v).abs() < 1e-12);
        assert_eq!(spec.covariance(64, 1, 3), spec.covariance(64, 3, 1));
    }
}
