//! Estimation of support-line intercepts from blockwise maxima of `|U_n|`.
//!
//! The circle `(−π, π]` is split into blocks of length about `c(n)/n`. Each
//! block reports the largest `|U_n|` on a dense grid; maxima at or below
//! `δ + κ(log n/n)^{1/4}` are discarded, survivors closer than `c(n)/n` are
//! merged in favour of the larger one, and what remains is refined by a
//! local grid search followed by golden-section search.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Result};
use crate::model::TimeSeries;
use crate::spectral::fourier::{integrated_periodogram, u_grid, UGrid};
use crate::spectral::freq::{circular_distance, wrap};
use crate::spectral::kernels::sinc_n;

/// Choice of the block-length numerator `c(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockRule {
    Log,
    Sqrt,
    Constant(f64),
}

impl BlockRule {
    pub fn c(&self, n: usize) -> f64 {
        match *self {
            Self::Log => (n as f64).ln(),
            Self::Sqrt => (n as f64).sqrt(),
            Self::Constant(c) => c,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Log => "log".into(),
            Self::Sqrt => "sqrt".into(),
            Self::Constant(c) => format!("{c}"),
        }
    }
}

/// Half of the circle searched for lines; the other half holds mirror images.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchSide {
    /// `(0, π]`.
    Positive,
    /// `(−π, 0)` together with `π`.
    Negative,
}

impl SearchSide {
    fn contains(&self, b: f64) -> bool {
        match self {
            Self::Positive => b > 0.0,
            Self::Negative => b < 0.0 || b == PI,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectionConfig {
    /// Detection level `δ > 0`.
    pub delta: f64,
    pub block: BlockRule,
    /// The refinement grid has step `2π/(refine_factor·(n+1)·8)`.
    pub refine_factor: usize,
    /// Run the local refinement at all.
    pub refine: bool,
    /// Radius around `b = 0` excluded from the search; `4c(n)/n` if unset.
    pub zero_exclusion: Option<f64>,
    /// Also report `ω̂ = b̂/2`.
    pub report_half: bool,
    /// Coarse grid size `N`; if unset the smallest `N ≥ n + 1` with step at
    /// most `c(n)/(8n)`.
    pub grid: Option<usize>,
    /// Multiplier `κ` of `(log n/n)^{1/4}` in the threshold.
    pub rate_scale: f64,
    /// Keep at most this many lines, largest magnitude first.
    pub max_lines: Option<usize>,
    pub side: SearchSide,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            delta: 0.1,
            block: BlockRule::Log,
            refine_factor: 4,
            refine: true,
            zero_exclusion: None,
            report_half: false,
            grid: None,
            rate_scale: 1.0,
            max_lines: None,
            side: SearchSide::Positive,
        }
    }
}

impl DetectionConfig {
    pub fn with_delta(delta: f64) -> Self {
        Self {
            delta,
            ..Self::default()
        }
    }

    pub fn c(&self, n: usize) -> f64 {
        self.block.c(n)
    }

    /// Minimum separation `c(n)/n` between reported lines.
    pub fn separation(&self, n: usize) -> f64 {
        self.c(n) / n as f64
    }

    /// `δ + κ(log n/n)^{1/4}`.
    pub fn threshold(&self, n: usize) -> f64 {
        let nf = n as f64;
        self.delta + self.rate_scale * (nf.ln() / nf).powf(0.25)
    }

    pub fn exclusion(&self, n: usize) -> f64 {
        self.zero_exclusion.unwrap_or(4.0 * self.separation(n))
    }

    pub fn block_count(&self, n: usize) -> usize {
        (2.0 * PI * n as f64 / self.c(n)).ceil() as usize
    }

    pub fn grid_size(&self, n: usize) -> usize {
        self.grid
            .unwrap_or_else(|| ((16.0 * PI * n as f64 / self.c(n)).ceil() as usize).max(n + 1))
    }

    /// Localization radius `n^{−1/5}/n`.
    pub fn localization_radius(n: usize) -> f64 {
        (n as f64).powf(-1.2)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if n < 16 {
            return invalid_arg(format!("line detection needs n ≥ 16, got {n}"));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return invalid_arg(format!("δ must be positive, got {}", self.delta));
        }
        if !(self.rate_scale.is_finite() && self.rate_scale >= 0.0) {
            return invalid_arg(format!("κ must be nonnegative, got {}", self.rate_scale));
        }
        let c = self.c(n);
        if !(c.is_finite() && c > 0.0 && c < n as f64) {
            return invalid_arg(format!("block numerator c(n) = {c} must lie in (0, n)"));
        }
        if self.refine_factor == 0 {
            return invalid_arg("refine factor must be at least 1");
        }
        let blocks = self.block_count(n);
        if blocks < 4 {
            return invalid_arg(format!("only {blocks} blocks; need at least 4"));
        }
        if let Some(r) = self.zero_exclusion {
            if !(r.is_finite() && r >= 2.0 * self.separation(n)) {
                return invalid_arg(format!(
                    "zero exclusion {r} must be at least 2c(n)/n = {}",
                    2.0 * self.separation(n)
                ));
            }
        }
        if self.grid_size(n) < n + 1 {
            return invalid_arg(format!(
                "coarse grid {} must be at least n + 1 = {}",
                self.grid_size(n),
                n + 1
            ));
        }
        if self.max_lines == Some(0) {
            return invalid_arg("max_lines must be at least 1");
        }
        Ok(())
    }
}

/// Largest `|U_n|` on the coarse grid inside one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockMax {
    pub block: usize,
    /// Location in `(−π, π]`.
    pub b: f64,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectedLine {
    pub b_hat: f64,
    /// `b̂/2` when half-frequency reporting is on.
    pub omega_hat: Option<f64>,
    pub magnitude: f64,
    pub block: usize,
    pub refined: bool,
}

#[derive(Debug, Clone)]
pub struct DetectionResult {
    pub n: usize,
    pub lines: Vec<DetectedLine>,
    /// `U_n(0)`, reported separately from the line search.
    pub u_zero: Complex64,
    pub threshold: f64,
    pub c_n: f64,
    pub grid: usize,
    /// Median block maximum plus five MADs.
    pub suggested_delta: f64,
}

/// Breaks ties between equal magnitudes in favour of the smaller `|b|`.
fn stronger(a: &BlockMax, b: &BlockMax) -> std::cmp::Ordering {
    b.magnitude
        .total_cmp(&a.magnitude)
        .then(a.b.abs().total_cmp(&b.b.abs()))
        .then(a.b.total_cmp(&b.b))
}

fn block_maxima(u: &UGrid, blocks: usize) -> Vec<BlockMax> {
    let width = 2.0 * PI / blocks as f64;
    let mut best: Vec<Option<BlockMax>> = vec![None; blocks];
    for (j, z) in u.values.iter().enumerate() {
        let b = u.intercept(j);
        // block k covers (−π + k·width, −π + (k+1)·width]
        let k = (((b + PI) / width).ceil() as usize).clamp(1, blocks) - 1;
        let cand = BlockMax {
            block: k,
            b,
            magnitude: z.norm(),
        };
        match &best[k] {
            Some(cur) if stronger(cur, &cand) != std::cmp::Ordering::Greater => {}
            _ => best[k] = Some(cand),
        }
    }
    best.into_iter().flatten().collect()
}

/// Per-block maxima of `|U_n|` in order of location.
pub fn coarse_scan(x: &TimeSeries, cfg: &DetectionConfig) -> Result<Vec<BlockMax>> {
    let n = x.n();
    cfg.validate(n)?;
    let u = u_grid(x, cfg.grid_size(n))?;
    let mut maxima = block_maxima(&u, cfg.block_count(n));
    maxima.sort_by(|a, b| a.b.total_cmp(&b.b));
    Ok(maxima)
}

/// Greedy merge: strongest first, dropping anything within `sep` of a kept one.
fn dedupe(mut items: Vec<BlockMax>, sep: f64) -> Vec<BlockMax> {
    items.sort_by(stronger);
    let mut kept: Vec<BlockMax> = Vec::new();
    for m in items {
        if kept.iter().all(|k| circular_distance(k.b, m.b) > sep) {
            kept.push(m);
        }
    }
    kept
}

/// Thresholding, restriction to the search side, merging of close maxima,
/// zero exclusion and the optional cap on the number of lines.
pub fn threshold_and_dedupe(maxima: &[BlockMax], n: usize, cfg: &DetectionConfig) -> Vec<BlockMax> {
    let thr = cfg.threshold(n);
    let excl = cfg.exclusion(n);
    let survivors: Vec<BlockMax> = maxima
        .iter()
        .copied()
        .filter(|m| m.magnitude > thr && cfg.side.contains(m.b))
        .collect();
    let mut kept: Vec<BlockMax> = dedupe(survivors, cfg.separation(n))
        .into_iter()
        .filter(|m| m.b.abs() > excl)
        .collect();
    // with refinement on, the cap is applied to the refined magnitudes
    if let (Some(k), false) = (cfg.max_lines, cfg.refine) {
        kept.truncate(k);
    }
    kept
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Local grid search around `candidate` followed by golden-section search
/// on `|U_n|`.
///
/// The local grid has step `2π/(refine_factor·(n+1)·8)` and covers the
/// larger of one coarse cell and `c(n)/(2n)` on each side. If its maximizer
/// is not an interior strict local maximum the grid maximizer is returned
/// with `refined = false`.
pub fn refine(x: &TimeSeries, candidate: &BlockMax, cfg: &DetectionConfig) -> DetectedLine {
    let n = x.n();
    let mag = |b: f64| integrated_periodogram(x, b).norm();
    let step = 2.0 * PI / (cfg.refine_factor as f64 * (n as f64 + 1.0) * 8.0);
    let coarse = 2.0 * PI / cfg.grid_size(n) as f64;
    let half_span = coarse.max(0.5 * cfg.separation(n));
    let k = (half_span / step).ceil() as i64;
    let pts: Vec<f64> = (-k..=k).map(|i| candidate.b + i as f64 * step).collect();
    let vals: Vec<f64> = pts.par_iter().map(|&b| mag(b)).collect();
    let mut best = 0;
    for (i, v) in vals.iter().enumerate() {
        // strict comparison keeps the point nearest the centre on exact ties
        let closer = (i as i64 - k).abs() < (best as i64 - k).abs();
        if *v > vals[best] || (*v == vals[best] && closer) {
            best = i;
        }
    }
    let line = |b: f64, magnitude: f64, refined: bool| {
        let b_hat = wrap(b);
        DetectedLine {
            b_hat,
            omega_hat: cfg.report_half.then_some(0.5 * b_hat),
            magnitude,
            block: candidate.block,
            refined,
        }
    };
    let interior = best > 0 && best + 1 < pts.len();
    if !interior || vals[best - 1] > vals[best] || vals[best + 1] > vals[best] {
        return line(pts[best], vals[best], false);
    }
    let tol = 1e-4 / n as f64;
    let (mut lo, mut hi) = (pts[best - 1], pts[best + 1]);
    let mut x1 = hi - GOLDEN * (hi - lo);
    let mut x2 = lo + GOLDEN * (hi - lo);
    let (mut f1, mut f2) = (mag(x1), mag(x2));
    let (mut arg, mut top) = (pts[best], vals[best]);
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - GOLDEN * (hi - lo);
            f1 = mag(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + GOLDEN * (hi - lo);
            f2 = mag(x2);
        }
        for (xv, fv) in [(x1, f1), (x2, f2)] {
            if fv > top {
                arg = xv;
                top = fv;
            }
        }
    }
    line(arg, top, true)
}

/// Median plus five median absolute deviations of the block maxima outside
/// the zero exclusion.
pub fn suggest_delta(maxima: &[BlockMax], n: usize, cfg: &DetectionConfig) -> f64 {
    let excl = cfg.exclusion(n);
    let mut m: Vec<f64> = maxima
        .iter()
        .filter(|m| m.b.abs() > excl)
        .map(|m| m.magnitude)
        .collect();
    if m.is_empty() {
        return 0.0;
    }
    let med = median(&mut m);
    let mut dev: Vec<f64> = m.iter().map(|v| (v - med).abs()).collect();
    med + 5.0 * median(&mut dev)
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Drops candidates that cannot reach the `k`-th largest magnitude after
/// refinement. A peak sampled half a grid step off loses at most the factor
/// `sinc_n(π/grid)`; a further 0.8 leaves room for noise.
fn plausible_top(mut candidates: Vec<BlockMax>, k: usize, n: usize, grid: usize) -> Vec<BlockMax> {
    if candidates.len() <= k {
        return candidates;
    }
    let mut mags: Vec<f64> = candidates.iter().map(|c| c.magnitude).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let cutoff = 0.8 * sinc_n(PI / grid as f64, n) * mags[k - 1];
    candidates.retain(|c| c.magnitude >= cutoff);
    candidates
}

/// Full pipeline: scan, threshold, merge, refine. Lines are sorted by `|b̂|`.
pub fn detect_lines(x: &TimeSeries, cfg: &DetectionConfig) -> Result<DetectionResult> {
    let n = x.n();
    let maxima = coarse_scan(x, cfg)?;
    let mut candidates = threshold_and_dedupe(&maxima, n, cfg);
    if let (Some(k), true) = (cfg.max_lines, cfg.refine) {
        candidates = plausible_top(candidates, k, n, cfg.grid_size(n));
    }
    let mut lines: Vec<DetectedLine> = if cfg.refine {
        candidates.par_iter().map(|c| refine(x, c, cfg)).collect()
    } else {
        candidates
            .iter()
            .map(|c| DetectedLine {
                b_hat: c.b,
                omega_hat: cfg.report_half.then_some(0.5 * c.b),
                magnitude: c.magnitude,
                block: c.block,
                refined: false,
            })
            .collect()
    };
    // two candidates may climb the same peak
    let sep = cfg.separation(n);
    lines.sort_by(|a, b| {
        b.magnitude
            .total_cmp(&a.magnitude)
            .then(a.b_hat.abs().total_cmp(&b.b_hat.abs()))
    });
    let mut kept: Vec<DetectedLine> = Vec::new();
    for l in lines {
        if kept.iter().all(|k| circular_distance(k.b_hat, l.b_hat) > sep) {
            kept.push(l);
        }
    }
    if let Some(k) = cfg.max_lines {
        kept.truncate(k);
    }
    kept.sort_by(|a, b| a.b_hat.abs().total_cmp(&b.b_hat.abs()));
    Ok(DetectionResult {
        n,
        lines: kept,
        u_zero: integrated_periodogram(x, 0.0),
        threshold: cfg.threshold(n),
        c_n: cfg.c(n),
        grid: cfg.grid_size(n),
        suggested_delta: suggest_delta(&maxima, n, cfg),
    })
}
