//! Order-independent summary statistics.
//!
//! Every summary sorts its input first, so permuting replicates leaves the
//! result bit-identical.

use num_complex::Complex64;

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Mean, variance and quantiles of a sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Standard error of the mean.
    pub se: f64,
    pub median: f64,
    pub max: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Self {
        let v = sorted(xs);
        let count = v.len();
        if count == 0 {
            return Self {
                count,
                mean: f64::NAN,
                variance: f64::NAN,
                se: f64::NAN,
                median: f64::NAN,
                max: f64::NAN,
            };
        }
        let mean = v.iter().sum::<f64>() / count as f64;
        let variance = if count > 1 {
            v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64
        } else {
            0.0
        };
        Self {
            count,
            mean,
            variance,
            se: (variance / count as f64).sqrt(),
            median: median_sorted(&v),
            max: v[count - 1],
        }
    }
}

fn median_sorted(v: &[f64]) -> f64 {
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

pub fn median(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    median_sorted(&sorted(xs))
}

/// Mean and spread of a complex sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexSummary {
    pub count: usize,
    pub mean: Complex64,
    /// Standard error of the mean, `√(se_re² + se_im²)`.
    pub se: f64,
    /// `E|z − Ez|²` estimated with the `1/(R − 1)` normalization.
    pub variance: f64,
    /// Standard error of [`variance`](Self::variance).
    pub variance_se: f64,
}

impl ComplexSummary {
    pub fn of(zs: &[Complex64]) -> Self {
        let re: Vec<f64> = zs.iter().map(|z| z.re).collect();
        let im: Vec<f64> = zs.iter().map(|z| z.im).collect();
        let (sr, si) = (Summary::of(&re), Summary::of(&im));
        let mean = Complex64::new(sr.mean, si.mean);
        let count = zs.len();
        let r = count as f64;
        let dev: Vec<f64> = zs.iter().map(|z| (z - mean).norm_sqr() * r / (r - 1.0)).collect();
        let sd = Summary::of(&dev);
        Self {
            count,
            mean,
            se: (sr.se.powi(2) + si.se.powi(2)).sqrt(),
            variance: sd.mean,
            variance_se: sd.se,
        }
    }
}

/// Sample skewness `g₁ = m₃/m₂^{3/2}`.
pub fn skewness(xs: &[f64]) -> f64 {
    let (m2, m3, _) = central_moments(xs);
    m3 / m2.powf(1.5)
}

/// Sample excess kurtosis `g₂ = m₄/m₂² − 3`.
pub fn excess_kurtosis(xs: &[f64]) -> f64 {
    let (m2, _, m4) = central_moments(xs);
    m4 / (m2 * m2) - 3.0
}

fn central_moments(xs: &[f64]) -> (f64, f64, f64) {
    let v = sorted(xs);
    let r = v.len() as f64;
    let mean = v.iter().sum::<f64>() / r;
    let mut m = (0.0, 0.0, 0.0);
    for x in &v {
        let d = x - mean;
        m.0 += d * d;
        m.1 += d * d * d;
        m.2 += d * d * d * d;
    }
    (m.0 / r, m.1 / r, m.2 / r)
}

/// Pearson correlation of paired samples.
pub fn correlation(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let mut pairs: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let r = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / r;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / r;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in &pairs {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx).powi(2);
        syy += (y - my).powi(2);
    }
    sxy / (sxx * syy).sqrt()
}

/// `|Σ(z − z̄)·conj(w − w̄)| / √(Σ|z − z̄|²·Σ|w − w̄|²)`.
pub fn complex_correlation(zs: &[Complex64], ws: &[Complex64]) -> f64 {
    assert_eq!(zs.len(), ws.len());
    let mut pairs: Vec<(Complex64, Complex64)> =
        zs.iter().copied().zip(ws.iter().copied()).collect();
    pairs.sort_by(|a, b| {
        a.0.re
            .total_cmp(&b.0.re)
            .then(a.0.im.total_cmp(&b.0.im))
            .then(a.1.re.total_cmp(&b.1.re))
            .then(a.1.im.total_cmp(&b.1.im))
    });
    let r = pairs.len() as f64;
    let mz = pairs.iter().map(|p| p.0).sum::<Complex64>() / r;
    let mw = pairs.iter().map(|p| p.1).sum::<Complex64>() / r;
    let (mut szw, mut szz, mut sww) = (Complex64::default(), 0.0, 0.0);
    for (z, w) in &pairs {
        szw += (z - mz) * (w - mw).conj();
        szz += (z - mz).norm_sqr();
        sww += (w - mw).norm_sqr();
    }
    szw.norm() / (szz * sww).sqrt()
}

/// Least-squares slope of `log y` on `log x`; `None` with fewer than two
/// usable points.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0 && x.is_finite() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let r = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / r;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / r;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}
