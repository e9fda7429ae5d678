use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::stats::{
    complex_correlation, correlation, excess_kurtosis, log_log_slope, skewness,
    ComplexSummary, Summary,
};
use super::{
    BandwidthRule, ClaimCheck, Experiment, ExperimentPlan, InterceptMode, RateReport, RateRow,
};
use crate::detect::{detect_lines, DetectionConfig, SearchSide};
use crate::error::{invalid_arg, Result};
use crate::model::rng::replicate_seed;
use crate::model::{LineSpectrum, TimeSeries};
use crate::oracle::{bias_curve, sup_deviation_bound, variance_formula, ExactMoments};
use crate::spectral::fourier::{integrated_periodogram, u_grid};
use crate::spectral::freq::{circular_distance, wrap};
use crate::spectral::smoothing::{Kernel, LineSmoother};

/// Runs `f` on every replicate of size `n`, in parallel, returning results in
/// replicate order.
fn replicates<T: Send>(
    plan: &ExperimentPlan,
    n: usize,
    f: impl Fn(TimeSeries) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    (0..plan.replicates)
        .into_par_iter()
        .map(|r| f(plan.model.simulate(n, replicate_seed(plan.base_seed, n, r))?))
        .collect()
}

fn check(
    claim: impl Into<String>,
    n: Option<usize>,
    value: f64,
    se: Option<f64>,
    target: f64,
    tolerance: impl Into<String>,
    pass: bool,
) -> ClaimCheck {
    ClaimCheck {
        claim: claim.into(),
        n,
        value,
        se,
        target,
        tolerance: tolerance.into(),
        pass,
    }
}

fn row(n: usize, xs: &[f64]) -> RateRow {
    let s = Summary::of(xs);
    RateRow {
        n,
        count: s.count,
        median: s.median,
        mean: s.mean,
        variance: s.variance,
        se: s.se,
    }
}

fn slope_over_n(rows: &[RateRow], scale: impl Fn(usize) -> f64) -> Option<f64> {
    if rows.len() < 3 {
        return None;
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.median / scale(r.n)).collect();
    log_log_slope(&xs, &ys)
}

/// Factor `1/(1 − πn/(2R))` bounding how much the sup over an `R`-point grid
/// can undershoot the true sup of the order-`n/2` trigonometric polynomial
/// `U_n − EU_n` (Bernstein's inequality).
pub fn sup_grid_correction(n: usize, grid: usize) -> f64 {
    1.0 / (1.0 - PI * n as f64 / (2.0 * grid as f64))
}

pub fn run_sup_deviation(plan: &ExperimentPlan) -> Result<RateReport> {
    plan.validate()?;
    let lines = plan.model.theoretical_lines()?;
    let bound = sup_deviation_bound(&lines);
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &n in &plan.n_values {
        let grid = 8 * (n + 1);
        let corr = sup_grid_correction(n, grid);
        let eu = ExactMoments::new(&plan.model, n)?.mean_un_grid(grid)?;
        let sups = replicates(plan, n, |x| {
            let u = u_grid(&x, grid)?;
            Ok(u.values
                .iter()
                .zip(&eu)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
                * corr)
        })?;
        let nf = n as f64;
        let normalized: Vec<f64> = sups
            .iter()
            .map(|s| s * (nf + 1.0) / (nf * nf.ln()).sqrt())
            .collect();
        let worst = Summary::of(&normalized).max;
        checks.push(check(
            "max normalized sup deviation below bound",
            Some(n),
            worst,
            None,
            bound,
            "≤ 2^{5/2}·q·Σc(j)",
            worst <= bound,
        ));
        rows.push(row(n, &sups));
    }
    let slope = slope_over_n(&rows, |n| (n as f64).ln().sqrt());
    if let Some(s) = slope {
        checks.push(check(
            "median sup deviation / √log n slope",
            None,
            s,
            None,
            -0.5,
            "± 0.15",
            (s + 0.5).abs() <= 0.15,
        ));
    }
    Ok(RateReport {
        experiment: "sup-deviation".into(),
        quantity: "sup_w |U_n(w) − EU_n(w)| (grid-corrected)".into(),
        rows,
        slope,
        theoretical_slope: Some(-0.5),
        checks,
    })
}

/// Smallest `|∫f_b|` over the nonzero lines, the natural scale for `δ`.
pub fn line_mass_floor(lines: &LineSpectrum) -> Option<f64> {
    lines
        .lines()
        .iter()
        .filter(|l| l.intercept != 0.0)
        .map(|l| l.density.integral().norm())
        .min_by(f64::total_cmp)
}

/// Detected intercept nearest to `b` within `c(n)/n`, mirrored when `b`
/// lies on the other half of the circle.
fn matched_intercept(x: &TimeSeries, cfg: &DetectionConfig, b: f64) -> Result<Option<f64>> {
    let n = x.n();
    let found = detect_lines(x, cfg)?;
    let flip = match cfg.side {
        SearchSide::Positive => b < 0.0,
        SearchSide::Negative => b > 0.0 && b != PI,
    };
    let target = if flip { wrap(-b) } else { b };
    let radius = cfg.separation(n);
    Ok(found
        .lines
        .iter()
        .map(|l| l.b_hat)
        .filter(|&bh| circular_distance(bh, target) <= radius)
        .min_by(|a, b| {
            circular_distance(*a, target).total_cmp(&circular_distance(*b, target))
        })
        .map(|bh| if flip { wrap(-bh) } else { bh }))
}

pub fn run_detection_accuracy(plan: &ExperimentPlan) -> Result<RateReport> {
    plan.validate()?;
    let lines = plan.model.theoretical_lines()?;
    let cfg = &plan.detection;
    let targets: Vec<f64> = lines
        .intercepts()
        .into_iter()
        .filter(|&b| {
            b != 0.0
                && match cfg.side {
                    SearchSide::Positive => b > 0.0,
                    SearchSide::Negative => b < 0.0 || b == PI,
                }
        })
        .collect();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut last_miss = 0.0;
    for &n in &plan.n_values {
        let radius = cfg.separation(n);
        // per replicate: (errors of matched targets, misses, unmatched detections)
        let per = replicates(plan, n, |x| {
            let found = detect_lines(&x, cfg)?;
            let mut errs = Vec::new();
            let mut misses = 0usize;
            let mut used = vec![false; found.lines.len()];
            for &b in &targets {
                let best = found
                    .lines
                    .iter()
                    .enumerate()
                    .map(|(i, l)| (i, circular_distance(l.b_hat, b)))
                    .filter(|(_, d)| *d <= radius)
                    .min_by(|a, b| a.1.total_cmp(&b.1));
                match best {
                    Some((i, d)) => {
                        used[i] = true;
                        errs.push(d);
                    }
                    None => misses += 1,
                }
            }
            let spurious = used.iter().filter(|u| !**u).count();
            Ok((errs, misses, spurious))
        })?;
        let errs: Vec<f64> = per.iter().flat_map(|p| p.0.iter().copied()).collect();
        let misses: usize = per.iter().map(|p| p.1).sum();
        let alarms = per.iter().filter(|p| p.2 > 0).count();
        let reps = plan.replicates as f64;
        let alarm_rate = alarms as f64 / reps;
        if targets.is_empty() {
            checks.push(check(
                "false-alarm rate",
                Some(n),
                alarm_rate,
                Some((alarm_rate * (1.0 - alarm_rate) / reps).sqrt()),
                0.05,
                "≤",
                alarm_rate <= 0.05,
            ));
        } else {
            last_miss = misses as f64 / (reps * targets.len() as f64);
        }
        rows.push(row(n, &errs));
    }
    let slope = slope_over_n(&rows, |_| 1.0);
    if !targets.is_empty() {
        let n_max = *plan.n_values.iter().max().unwrap();
        let trials = plan.replicates as f64 * targets.len() as f64;
        checks.push(check(
            "miss rate at largest n",
            Some(n_max),
            last_miss,
            Some((last_miss * (1.0 - last_miss) / trials).sqrt()),
            0.05,
            "≤",
            last_miss <= 0.05,
        ));
        if let Some(s) = slope {
            checks.push(check(
                "median localization error slope",
                None,
                s,
                None,
                -0.9,
                "≤",
                s <= -0.9,
            ));
        }
    }
    Ok(RateReport {
        experiment: "detection".into(),
        quantity: "|b̂ − b| over detected true lines".into(),
        rows,
        slope,
        theoretical_slope: Some(-1.0),
        checks,
    })
}

/// `f̂_w(η)` for every kernel and `η`, kernel-major.
fn estimates(x: &TimeSeries, w: f64, kernels: &[Kernel], etas: &[f64]) -> Result<Vec<Complex64>> {
    let s = LineSmoother::new(x, w)?;
    Ok(kernels
        .iter()
        .flat_map(|k| etas.iter().map(move |&e| (k, e)))
        .map(|(k, e)| s.estimate(k, e))
        .collect())
}

/// Per replicate, estimates at `b` (or its detected counterpart); `None`
/// when the line was missed.
fn line_replicates(
    plan: &ExperimentPlan,
    n: usize,
    b: f64,
    kernels: &[Kernel],
    etas: &[f64],
    mode: InterceptMode,
) -> Result<Vec<Option<Vec<Complex64>>>> {
    replicates(plan, n, |x| {
        let w = match mode {
            InterceptMode::Known => Some(b),
            InterceptMode::Estimated => matched_intercept(&x, &plan.detection, b)?,
        };
        w.map(|w| estimates(&x, w, kernels, etas)).transpose()
    })
}

fn column(samples: &[Vec<Complex64>], i: usize) -> Vec<Complex64> {
    samples.iter().map(|s| s[i]).collect()
}

fn miss_check(n: usize, missed: usize, total: usize) -> ClaimCheck {
    let rate = missed as f64 / total as f64;
    check(
        "line missed by the detector",
        Some(n),
        rate,
        Some((rate * (1.0 - rate) / total as f64).sqrt()),
        0.05,
        "≤",
        rate <= 0.05,
    )
}

fn require_line(lines: &LineSpectrum, b: f64) -> Result<()> {
    if lines.line(b).is_none() {
        return invalid_arg(format!("model has no line at intercept {b}"));
    }
    Ok(())
}

pub fn run_bias_experiment(
    plan: &ExperimentPlan,
    b: f64,
    etas: &[f64],
    bandwidths: &[f64],
    mode: InterceptMode,
) -> Result<RateReport> {
    plan.validate()?;
    if etas.is_empty() || bandwidths.is_empty() {
        return invalid_arg("bias experiment needs probe frequencies and bandwidths");
    }
    let lines = plan.model.theoretical_lines()?;
    require_line(&lines, b)?;
    let kernels: Vec<Kernel> = bandwidths
        .iter()
        .map(|&h| Kernel::new(plan.kernel.clone(), h))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut slope = None;
    for &n in &plan.n_values {
        let raw = line_replicates(plan, n, b, &kernels, etas, mode)?;
        let samples: Vec<Vec<Complex64>> = raw.iter().flatten().cloned().collect();
        if mode == InterceptMode::Estimated {
            checks.push(miss_check(n, raw.len() - samples.len(), raw.len()));
        }
        if samples.len() < 2 {
            return invalid_arg("too few replicates with a detected line");
        }
        // measured[k][e] = mean − f, with its SE and the predicted bias term
        let mut measured = vec![vec![(Complex64::default(), 0.0, Complex64::default()); etas.len()]; kernels.len()];
        for (ki, k) in kernels.iter().enumerate() {
            for (ei, &eta) in etas.iter().enumerate() {
                let s = ComplexSummary::of(&column(&samples, ki * etas.len() + ei));
                let f = lines.density(b, eta);
                let target = bias_curve(&lines, b, eta, k);
                let term = target - f;
                let gap = (s.mean - target).norm();
                let tol = (4.0 * s.se).max(0.15 * term.norm());
                checks.push(check(
                    format!("mean of f̂ at η={eta:.6} b_n={:.4}", k.bandwidth),
                    Some(n),
                    gap,
                    Some(s.se),
                    tol,
                    "|mean − (f + bias)| ≤ max(4 SE, 0.15|bias|)",
                    gap <= tol,
                ));
                measured[ki][ei] = (s.mean - f, s.se, term);
            }
        }
        // doubling the bandwidth should quadruple the bias
        for (k1, a) in kernels.iter().enumerate() {
            for (k2, c) in kernels.iter().enumerate() {
                if (c.bandwidth / a.bandwidth - 2.0).abs() > 1e-9 {
                    continue;
                }
                for (ei, &eta) in etas.iter().enumerate() {
                    let (b1, se1, term) = measured[k1][ei];
                    if term.norm() <= 4.0 * se1 {
                        continue;
                    }
                    let (b2, se2, _) = measured[k2][ei];
                    let ratio = (b2 * b1.conj()).re / b1.norm_sqr();
                    let se = (se2 * se2 + 16.0 * se1 * se1).sqrt() / b1.norm();
                    checks.push(check(
                        format!(
                            "bias ratio b_n {:.4} → {:.4} at η={eta:.6}",
                            a.bandwidth, c.bandwidth
                        ),
                        Some(n),
                        ratio,
                        Some(se),
                        4.0,
                        "± 1",
                        (ratio - 4.0).abs() <= 1.0,
                    ));
                }
            }
        }
        let first: Vec<f64> = column(&samples, 0)
            .iter()
            .map(|z| (z - lines.density(b, etas[0])).re)
            .collect();
        rows.push(row(n, &first));
        if kernels.len() >= 3 && slope.is_none() {
            if let Some(ei) = (0..etas.len()).find(|&e| measured[0][e].2.norm() > 4.0 * measured[0][e].1) {
                let hs: Vec<f64> = kernels.iter().map(|k| k.bandwidth).collect();
                let bs: Vec<f64> = measured.iter().map(|m| m[ei].0.norm()).collect();
                slope = log_log_slope(&hs, &bs);
            }
        }
    }
    Ok(RateReport {
        experiment: "bias".into(),
        quantity: "f̂_b(η) − f_b(η) (rows: first probe, first bandwidth; slope: |bias| vs b_n)".into(),
        rows,
        slope,
        theoretical_slope: Some(2.0),
        checks,
    })
}

pub fn run_variance_experiment(
    plan: &ExperimentPlan,
    b: f64,
    etas: &[f64],
    second: Option<f64>,
    mode: InterceptMode,
) -> Result<RateReport> {
    plan.validate()?;
    if etas.is_empty() {
        return invalid_arg("variance experiment needs probe frequencies");
    }
    let lines = plan.model.theoretical_lines()?;
    require_line(&lines, b)?;
    if let Some(b2) = second {
        require_line(&lines, b2)?;
    }
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &n in &plan.n_values {
        let kernel = plan.kernel_for(n)?;
        let ks = std::slice::from_ref(&kernel);
        let per = replicates(plan, n, |x| {
            let est = |target: f64| -> Result<Option<Vec<Complex64>>> {
                let w = match mode {
                    InterceptMode::Known => Some(target),
                    InterceptMode::Estimated => matched_intercept(&x, &plan.detection, target)?,
                };
                w.map(|w| estimates(&x, w, ks, etas)).transpose()
            };
            let first = est(b)?;
            let other = match second {
                Some(b2) => est(b2)?,
                None => None,
            };
            Ok((first, other))
        })?;
        let samples: Vec<Vec<Complex64>> = per.iter().filter_map(|p| p.0.clone()).collect();
        if mode == InterceptMode::Estimated {
            checks.push(miss_check(n, per.len() - samples.len(), per.len()));
        }
        for (ei, &eta) in etas.iter().enumerate() {
            let s = ComplexSummary::of(&column(&samples, ei));
            let v = variance_formula(&lines, b, eta, &kernel, n);
            let ratio = s.variance / v;
            checks.push(check(
                format!("variance ratio at η={eta:.6}"),
                Some(n),
                ratio,
                Some(s.variance_se / v),
                1.0,
                "within [0.7, 1.4]",
                (0.7..=1.4).contains(&ratio),
            ));
        }
        if second.is_some() {
            let pairs: Vec<(&Vec<Complex64>, &Vec<Complex64>)> = per
                .iter()
                .filter_map(|p| Some((p.0.as_ref()?, p.1.as_ref()?)))
                .collect();
            let r = pairs.len() as f64;
            for (ei, &eta) in etas.iter().enumerate() {
                let a: Vec<Complex64> = pairs.iter().map(|p| p.0[ei]).collect();
                let c: Vec<Complex64> = pairs.iter().map(|p| p.1[ei]).collect();
                let rho = complex_correlation(&a, &c);
                checks.push(check(
                    format!("cross-line |corr| at η={eta:.6}"),
                    Some(n),
                    rho,
                    Some(1.0 / r.sqrt()),
                    0.2,
                    "≤",
                    rho <= 0.2,
                ));
            }
        }
        let first: Vec<f64> = {
            let col = column(&samples, 0);
            let m = col.iter().sum::<Complex64>() / col.len() as f64;
            col.iter().map(|z| (z - m).norm_sqr()).collect()
        };
        rows.push(row(n, &first));
    }
    let theory = match plan.bandwidth {
        BandwidthRule::Power { exponent, .. } => -1.0 - exponent,
        BandwidthRule::Fixed { .. } => -1.0,
    };
    let slope = if rows.len() >= 3 {
        let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.mean).collect();
        log_log_slope(&xs, &ys)
    } else {
        None
    };
    if let Some(s) = slope {
        checks.push(check(
            "variance slope in n",
            None,
            s,
            None,
            theory,
            "± 0.15",
            (s - theory).abs() <= 0.15,
        ));
    }
    Ok(RateReport {
        experiment: "variance".into(),
        quantity: "|f̂_b(η) − mean|² at the first probe (mean = variance)".into(),
        rows,
        slope,
        theoretical_slope: Some(theory),
        checks,
    })
}

/// Rejects repeated probes and probes where `w_i − w_j + b + b'` or
/// `w_i + w_j + b + b'` falls within two main-lobe widths of 0.
fn validate_probes(probes: &[f64], lines: Option<&LineSpectrum>, n: usize) -> Result<()> {
    if probes.is_empty() {
        return invalid_arg("normality check needs at least one probe");
    }
    let lobe = 4.0 * PI / (n as f64 + 1.0);
    let bs = lines.map(|l| l.intercepts()).unwrap_or_else(|| vec![0.0]);
    for (i, &wi) in probes.iter().enumerate() {
        for (j, &wj) in probes.iter().enumerate() {
            if i != j && circular_distance(wi, wj) < lobe {
                return invalid_arg(format!("probes {wi} and {wj} coincide"));
            }
            for &b in &bs {
                for &bp in &bs {
                    let diff = i != j && circular_distance(wi - wj + b + bp, 0.0) < lobe;
                    let sum = circular_distance(wi + wj + b + bp, 0.0) < lobe;
                    if diff || sum {
                        return invalid_arg(format!(
                            "probes {wi}, {wj} hit the line combination b = {b}, b' = {bp}"
                        ));
                    }
                }
            }
        }
    }
    Ok(())
}

pub fn run_normality_check(plan: &ExperimentPlan, probes: &[f64]) -> Result<RateReport> {
    plan.validate()?;
    let lines = plan.model.theoretical_lines().ok();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &n in &plan.n_values {
        validate_probes(probes, lines.as_ref(), n)?;
        let exact = ExactMoments::new(&plan.model, n)?;
        let eu: Vec<Complex64> = probes.iter().map(|&w| exact.mean_un(w)).collect();
        let scale = (n as f64 + 1.0).sqrt();
        let per = replicates(plan, n, |x| {
            Ok(probes
                .iter()
                .zip(&eu)
                .map(|(&w, e)| scale * (integrated_periodogram(&x, w) - e))
                .collect::<Vec<Complex64>>())
        })?;
        let r = per.len() as f64;
        let mut coords: Vec<(String, Vec<f64>)> = Vec::new();
        for (i, &w) in probes.iter().enumerate() {
            coords.push((format!("Re V(w={w:.6})"), per.iter().map(|v| v[i].re).collect()));
            coords.push((format!("Im V(w={w:.6})"), per.iter().map(|v| v[i].im).collect()));
        }
        for (name, xs) in &coords {
            let g1 = skewness(xs);
            let g2 = excess_kurtosis(xs);
            checks.push(check(
                format!("skewness {name}"),
                Some(n),
                g1,
                Some((6.0 / r).sqrt()),
                0.0,
                "|g1| ≤ 0.15",
                g1.abs() <= 0.15,
            ));
            checks.push(check(
                format!("excess kurtosis {name}"),
                Some(n),
                g2,
                Some((24.0 / r).sqrt()),
                0.0,
                "|g2| ≤ 0.3",
                g2.abs() <= 0.3,
            ));
        }
        for i in 0..coords.len() {
            for j in i + 1..coords.len() {
                let rho = correlation(&coords[i].1, &coords[j].1);
                checks.push(check(
                    format!("corr {} ~ {}", coords[i].0, coords[j].0),
                    Some(n),
                    rho,
                    Some(1.0 / r.sqrt()),
                    0.0,
                    "|corr| ≤ 0.1",
                    rho.abs() <= 0.1,
                ));
            }
        }
        let first: Vec<f64> = per.iter().map(|v| v[0].norm()).collect();
        rows.push(row(n, &first));
    }
    Ok(RateReport {
        experiment: "normality".into(),
        quantity: "|√(n+1)(U_n(w) − EU_n(w))| at the first probe".into(),
        rows,
        slope: None,
        theoretical_slope: None,
        checks,
    })
}

pub fn run_equivalence(plan: &ExperimentPlan, b: f64, etas: &[f64]) -> Result<RateReport> {
    plan.validate()?;
    if etas.is_empty() {
        return invalid_arg("equivalence check needs probe frequencies");
    }
    let lines = plan.model.theoretical_lines()?;
    require_line(&lines, b)?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &n in &plan.n_values {
        let kernel = plan.kernel_for(n)?;
        let ks = std::slice::from_ref(&kernel);
        let per = replicates(plan, n, |x| {
            let known = estimates(&x, b, ks, etas)?;
            let est = matched_intercept(&x, &plan.detection, b)?
                .map(|w| Ok::<_, crate::Error>((w, estimates(&x, w, ks, etas)?)))
                .transpose()?;
            Ok((known, est))
        })?;
        let known: Vec<Vec<Complex64>> = per.iter().map(|p| p.0.clone()).collect();
        let estimated: Vec<Vec<Complex64>> =
            per.iter().filter_map(|p| p.1.as_ref().map(|e| e.1.clone())).collect();
        checks.push(miss_check(n, known.len() - estimated.len(), known.len()));
        if estimated.len() < 2 {
            return invalid_arg("too few replicates with a detected line");
        }
        for (ei, &eta) in etas.iter().enumerate() {
            let sk = ComplexSummary::of(&column(&known, ei));
            let se = ComplexSummary::of(&column(&estimated, ei));
            let dm = (sk.mean - se.mean).norm();
            let sem = (sk.se.powi(2) + se.se.powi(2)).sqrt();
            checks.push(check(
                format!("mean known vs estimated at η={eta:.6}"),
                Some(n),
                dm,
                Some(sem),
                2.0 * sem,
                "≤ 2 SE",
                dm <= 2.0 * sem,
            ));
            let dv = (sk.variance - se.variance).abs();
            let sev = (sk.variance_se.powi(2) + se.variance_se.powi(2)).sqrt();
            checks.push(check(
                format!("variance known vs estimated at η={eta:.6}"),
                Some(n),
                dv,
                Some(sev),
                2.0 * sev,
                "≤ 2 SE",
                dv <= 2.0 * sev,
            ));
        }
        let errs: Vec<f64> = per
            .iter()
            .filter_map(|p| p.1.as_ref().map(|e| circular_distance(e.0, b)))
            .collect();
        rows.push(row(n, &errs));
    }
    Ok(RateReport {
        experiment: "equivalence".into(),
        quantity: "|w_n(b) − b| of the detected intercept".into(),
        rows,
        slope: None,
        theoretical_slope: None,
        checks,
    })
}

/// Dispatches on the experiment kind.
pub fn run(plan: &ExperimentPlan, experiment: &Experiment) -> Result<RateReport> {
    match experiment {
        Experiment::SupDeviation => run_sup_deviation(plan),
        Experiment::Detection => run_detection_accuracy(plan),
        Experiment::Bias {
            intercept,
            etas,
            bandwidths,
            mode,
        } => run_bias_experiment(plan, *intercept, etas, bandwidths, *mode),
        Experiment::Variance {
            intercept,
            etas,
            second_intercept,
            mode,
        } => run_variance_experiment(plan, *intercept, etas, *second_intercept, *mode),
        Experiment::Normality { probes } => run_normality_check(plan, probes),
        Experiment::Equivalence { intercept, etas } => run_equivalence(plan, *intercept, etas),
    }
}
