//! Seeded Monte Carlo experiments checking the asymptotic claims.
//!
//! Replicate `r` at sample size `n` is simulated with seed
//! [`replicate_seed`](crate::model::rng::replicate_seed)`(base_seed, n, r)`.
//! Replicates run in parallel and are collected in seed order, and every
//! summary is order independent, so a plan reproduces bit for bit.

mod experiments;
pub mod stats;

pub use experiments::{
    line_mass_floor, run, run_bias_experiment, run_detection_accuracy, run_equivalence,
    run_normality_check, run_sup_deviation, run_variance_experiment, sup_grid_correction,
};

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::detect::DetectionConfig;
use crate::error::{invalid_arg, Result};
use crate::model::ProcessModel;
use crate::spectral::smoothing::{Kernel, KernelShape};

/// How the bandwidth depends on `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum BandwidthRule {
    /// `scale · n^{exponent}`.
    Power { scale: f64, exponent: f64 },
    Fixed { value: f64 },
}

impl Default for BandwidthRule {
    fn default() -> Self {
        Self::Power {
            scale: 1.0,
            exponent: -0.2,
        }
    }
}

impl BandwidthRule {
    pub fn bandwidth(&self, n: usize) -> f64 {
        match *self {
            Self::Power { scale, exponent } => scale * (n as f64).powf(exponent),
            Self::Fixed { value } => value,
        }
    }
}

/// Whether line estimates use the true intercept or the detected one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterceptMode {
    #[default]
    Known,
    Estimated,
}

/// Which claim an experiment checks, with its experiment-specific settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Experiment {
    /// `sup_w |U_n(w) − EU_n(w)|` against its almost-sure bound and rate.
    SupDeviation,
    /// Localization error and miss rate of the detector.
    Detection,
    /// Mean of `f̂_b(η)` against `f_b + (b_n²/2)f_b''∫x²K`.
    Bias {
        intercept: f64,
        etas: Vec<f64>,
        bandwidths: Vec<f64>,
        #[serde(default)]
        mode: InterceptMode,
    },
    /// Variance of `f̂_b(η)` against the leading-order formula.
    Variance {
        intercept: f64,
        etas: Vec<f64>,
        #[serde(default)]
        second_intercept: Option<f64>,
        #[serde(default)]
        mode: InterceptMode,
    },
    /// Skewness, kurtosis and correlation of `√(n+1)(U_n − EU_n)` at probes.
    Normality { probes: Vec<f64> },
    /// Mean and variance of `f̂` with detected versus true intercepts.
    Equivalence { intercept: f64, etas: Vec<f64> },
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Self::SupDeviation => "sup-deviation",
            Self::Detection => "detection",
            Self::Bias { .. } => "bias",
            Self::Variance { .. } => "variance",
            Self::Normality { .. } => "normality",
            Self::Equivalence { .. } => "equivalence",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub model: ProcessModel,
    pub n_values: Vec<usize>,
    pub replicates: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_kernel")]
    pub kernel: KernelShape,
    #[serde(default)]
    pub bandwidth: BandwidthRule,
    #[serde(default)]
    pub detection: DetectionConfig,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_kernel() -> KernelShape {
    KernelShape::Epanechnikov
}

impl ExperimentPlan {
    pub fn new(model: ProcessModel, n_values: Vec<usize>, replicates: usize, base_seed: u64) -> Self {
        Self {
            model,
            n_values,
            replicates,
            base_seed,
            kernel: default_kernel(),
            bandwidth: BandwidthRule::default(),
            detection: DetectionConfig::default(),
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.replicates < 20 {
            return invalid_arg(format!(
                "an experiment needs at least 20 replicates, got {}",
                self.replicates
            ));
        }
        if self.n_values.is_empty() {
            return invalid_arg("no sample sizes given");
        }
        if let Some(n) = self.n_values.iter().find(|n| **n % 2 != 0 || **n < 4) {
            return invalid_arg(format!("sample sizes must be even and ≥ 4, got {n}"));
        }
        Ok(())
    }

    pub fn kernel_for(&self, n: usize) -> Result<Kernel> {
        Kernel::new(self.kernel.clone(), self.bandwidth.bandwidth(n))
    }
}

/// Per-`n` summary of the experiment's target quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub n: usize,
    pub count: usize,
    pub median: f64,
    pub mean: f64,
    pub variance: f64,
    pub se: f64,
}

/// One pass/fail claim with the numbers it was decided on.
#[derive(Debug, Clone, PartialEq)]
pub struct ClaimCheck {
    pub claim: String,
    pub n: Option<usize>,
    pub value: f64,
    /// Monte Carlo standard error of `value`, when it is an estimate.
    pub se: Option<f64>,
    pub target: f64,
    pub tolerance: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub experiment: String,
    pub quantity: String,
    pub rows: Vec<RateRow>,
    /// Least-squares log-log slope of the per-`n` medians, with ≥ 3 sizes.
    pub slope: Option<f64>,
    pub theoretical_slope: Option<f64>,
    pub checks: Vec<ClaimCheck>,
}

impl RateReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// One line per claim and a verdict.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "experiment: {}", self.experiment);
        let _ = writeln!(s, "quantity:   {}", self.quantity);
        for r in &self.rows {
            let _ = writeln!(
                s,
                "  n={:<6} count={:<6} median={:.6e} mean={:.6e} se={:.3e}",
                r.n, r.count, r.median, r.mean, r.se
            );
        }
        if let Some(sl) = self.slope {
            let _ = writeln!(
                s,
                "  log-log slope {sl:.4} (theory {})",
                self.theoretical_slope
                    .map(|t| format!("{t:.4}"))
                    .unwrap_or_else(|| "n/a".into())
            );
        }
        for c in &self.checks {
            let _ = writeln!(
                s,
                "  [{}] {}{}: {:.6e}{} vs {:.6e} ({})",
                if c.pass { "PASS" } else { "FAIL" },
                c.claim,
                c.n.map(|n| format!(" n={n}")).unwrap_or_default(),
                c.value,
                c.se.map(|e| format!(" ± {e:.2e}")).unwrap_or_default(),
                c.target,
                c.tolerance
            );
        }
        let _ = writeln!(s, "verdict: {}", if self.pass() { "PASS" } else { "FAIL" });
        s
    }
}
