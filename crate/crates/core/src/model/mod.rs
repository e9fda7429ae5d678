//! Generative models with exact covariances and line spectra.

mod am;
mod ap;
mod covariance;
mod lines;
pub mod rng;
mod series;

pub use am::{AmModelSpec, Carrier};
pub use ap::{ApArSpec, ApMaSpec, ApSequence, ApTerm};
pub use covariance::WindowCovariance;
pub use lines::{
    CovarianceBound, LineDensity, LineSpectrum, SampledLine, SpectralLine, TrigTerm,
    INTERCEPT_TOL,
};
pub use series::TimeSeries;
pub(crate) use series::check_even;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A Gaussian process with almost periodic covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProcessModel {
    Am(AmModelSpec),
    ApMa(ApMaSpec),
    ApAr(ApArSpec),
}

impl ProcessModel {
    /// Stationary white noise with variance `var`.
    pub fn white_noise(var: f64) -> Result<Self> {
        Ok(Self::ApMa(ApMaSpec::new(vec![ApSequence::constant(1.0)], var)?))
    }

    pub fn two_carrier_am() -> Self {
        Self::Am(AmModelSpec::two_carrier_ma1())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Am(_) => "am",
            Self::ApMa(_) => "ap-ma",
            Self::ApAr(_) => "ap-ar",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Am(m) => m.validate(),
            Self::ApMa(m) => m.validate(),
            Self::ApAr(m) => m.validate(),
        }
    }

    /// One realization on `t = −n/2, …, n/2`, bit-identical per `(model, n, seed)`.
    pub fn simulate(&self, n: usize, seed: u64) -> Result<TimeSeries> {
        match self {
            Self::Am(m) => m.simulate(n, seed),
            Self::ApMa(m) => m.simulate(n, seed),
            Self::ApAr(m) => m.simulate(n, seed),
        }
    }

    /// Exact `r_{s,t} = E X_s X_t`.
    ///
    /// `n` only matters for the AR scheme, whose recursion starts a fixed
    /// number of steps before the window `[−n/2, n/2]`.
    pub fn covariance(&self, n: usize, s: i64, t: i64) -> f64 {
        match self {
            Self::Am(m) => m.covariance(s, t),
            Self::ApMa(m) => m.covariance(s, t),
            Self::ApAr(m) => m.covariance(n, s, t),
        }
    }

    /// All covariances inside the window of sample size `n`.
    pub fn window_covariance(&self, n: usize) -> Result<WindowCovariance> {
        check_even(n)?;
        Ok(match self {
            Self::Am(m) => WindowCovariance::from_fn(n, m.max_lag(), |s, t| m.covariance(s, t)),
            Self::ApMa(m) => WindowCovariance::from_fn(n, m.order(), |s, t| m.covariance(s, t)),
            Self::ApAr(m) => {
                let half = (n / 2) as i64;
                let lag = m.effective_lag().min(n);
                let v = m.variances(m.start(n), half);
                let offset = m.burn_in;
                let mut diags: Vec<Vec<f64>> = vec![v[offset..].to_vec()];
                for h in 1..=lag {
                    let prev = &diags[h - 1];
                    let d = (0..=n - h)
                        .map(|i| {
                            let s = i as i64 - half + h as i64;
                            prev[i] * m.coeff.eval(s)
                        })
                        .collect();
                    diags.push(d);
                }
                WindowCovariance::from_diagonals(n, diags)
            }
        })
    }

    /// Closed-form line spectrum; unavailable for the AR scheme.
    pub fn theoretical_lines(&self) -> Result<LineSpectrum> {
        match self {
            Self::Am(m) => Ok(m.theoretical_lines()),
            Self::ApMa(m) => Ok(m.theoretical_lines()),
            Self::ApAr(_) => Err(Error::Unsupported(
                "the autoregressive scheme has no closed-form line spectrum".into(),
            )),
        }
    }

    pub fn covariance_bound(&self) -> Result<CovarianceBound> {
        Ok(self.theoretical_lines()?.covariance_bound())
    }
}

impl From<AmModelSpec> for ProcessModel {
    fn from(m: AmModelSpec) -> Self {
        Self::Am(m)
    }
}

impl From<ApMaSpec> for ProcessModel {
    fn from(m: ApMaSpec) -> Self {
        Self::ApMa(m)
    }
}

impl From<ApArSpec> for ProcessModel {
    fn from(m: ApArSpec) -> Self {
        Self::ApAr(m)
    }
}
