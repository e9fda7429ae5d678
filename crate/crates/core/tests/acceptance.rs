//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use aplines::detect::{detect_lines, DetectionConfig, SearchSide};
use aplines::mc::stats::{log_log_slope, median};
use aplines::mc::{
    run_bias_experiment, run_equivalence, run_normality_check, run_sup_deviation,
    run_variance_experiment, ExperimentPlan, InterceptMode, RateReport,
};
use aplines::model::{AmModelSpec, Carrier, ProcessModel, TimeSeries};
use aplines::oracle::{approx_mean_periodogram, ExactMoments};
use aplines::spectral::{circular_distance, integrated_periodogram, periodogram, u_grid, wrap};
use aplines::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn omegas() -> [f64; 2] {
    [PI / (4.0 * 3f64.sqrt()), PI / (3.0 * 2f64.sqrt())]
}

/// Two largest off-diagonal peaks, as in the simulated example.
fn two_peak_config(grid: usize, refine: bool) -> DetectionConfig {
    DetectionConfig {
        delta: 0.05,
        rate_scale: 0.0,
        max_lines: Some(2),
        grid: Some(grid),
        refine,
        report_half: true,
        ..DetectionConfig::default()
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn from_report(r: &RateReport) -> Outcome {
    let failed: Vec<String> = r
        .checks
        .iter()
        .filter(|c| !c.pass)
        .map(|c| format!("{} (n={:?}: {:.4e} vs {:.4e} {})", c.claim, c.n, c.value, c.target, c.tolerance))
        .collect();
    let slope = r.slope.map(|s| format!(", slope {s:.3}")).unwrap_or_default();
    if failed.is_empty() {
        outcome(true, format!("{} checks passed{slope}", r.checks.len()))
    } else {
        outcome(false, format!("{} of {} checks failed{slope}: {}", failed.len(), r.checks.len(), failed.join("; ")))
    }
}

fn frequency_detection() -> Outcome {
    let model = ProcessModel::two_carrier_am();
    let n = 1024;
    let seeds = 50;
    // (name, config, error tolerance, allowed miss rate). The unrefined
    // N=1025 grid loses up to 1 − 2/π of a peak between grid points, so
    // the weaker line can drop into the noise maxima in a few seeds.
    let configs = [
        ("coarse N=1025", two_peak_config(1025, false), 2.0 * PI / 1025.0, 0.05),
        ("refined", two_peak_config(1025, true), 2.0 * PI / 4097.0, 0.0),
        ("grid N=4097", two_peak_config(4097, false), 2.0 * PI / 4097.0, 0.0),
    ];
    let mut errors = vec![[Vec::new(), Vec::new()]; configs.len()];
    let mut missed = vec![0usize; configs.len()];
    for seed in 0..seeds {
        let x = model.simulate(n, seed).unwrap();
        for (ci, (_, cfg, _, _)) in configs.iter().enumerate() {
            let found = detect_lines(&x, cfg).unwrap();
            for (j, w) in omegas().iter().enumerate() {
                let hit = found
                    .lines
                    .iter()
                    .filter_map(|l| l.omega_hat)
                    .map(|o| (o - w).abs())
                    .filter(|e| 2.0 * e <= cfg.separation(n))
                    .min_by(f64::total_cmp);
                match hit {
                    Some(e) => errors[ci][j].push(e),
                    None => missed[ci] += 1,
                }
            }
        }
    }
    let mut pass = true;
    let mut detail = format!("{seeds} seeds");
    for (ci, (name, _, tol, miss_rate)) in configs.iter().enumerate() {
        let meds: Vec<f64> = errors[ci].iter().map(|e| median(e)).collect();
        let rate = missed[ci] as f64 / (2 * seeds) as f64;
        pass &= meds.iter().all(|m| m <= tol) && rate <= *miss_rate;
        detail += &format!(
            "; {name}: median |ω̂−ω| {:.2e}, {:.2e} (≤ {:.2e}), missed {} (rate ≤ {miss_rate})",
            meds[0], meds[1], tol, missed[ci]
        );
    }
    outcome(pass, detail)
}

fn u_n_exactness() -> Outcome {
    let n = 1024;
    let x = ProcessModel::two_carrier_am().simulate(n, 11).unwrap();
    let m = (n + 1) as f64;
    let mut worst_grid: f64 = 0.0;
    for grid in [n + 1, 4097, 8 * (n + 1)] {
        let u = u_grid(&x, grid).unwrap();
        for j in 0..u.len() {
            let direct = integrated_periodogram(&x, u.frequency(j));
            let rel = (u.values[j] - direct).norm() / direct.norm().max(f64::MIN_POSITIVE);
            worst_grid = worst_grid.max(rel);
        }
    }
    // Parseval: U_n(0) against the Fourier-grid quadrature of I_n(λ, λ)
    let lambdas: Vec<f64> = (0..=n).map(|j| 2.0 * PI * j as f64 / m).collect();
    let quad: f64 = lambdas.iter().map(|&l| periodogram(&x, l, l).re).sum::<f64>() * 2.0 * PI / m;
    let u0 = integrated_periodogram(&x, 0.0).re;
    let parseval = (quad - u0).abs() / u0;
    // quadrature identity on and off the Fourier grid
    let mut worst_quad: f64 = 0.0;
    for b in [2.0 * PI * 3.0 / m, 0.9069, 1.4810, -2.2, PI] {
        let q: Complex64 =
            lambdas.iter().map(|&l| periodogram(&x, l + b, l)).sum::<Complex64>() * 2.0 * PI / m;
        let u = integrated_periodogram(&x, b);
        worst_quad = worst_quad.max((q - u).norm() / u0);
    }
    outcome(
        worst_grid <= 1e-9 && parseval <= 1e-10 && worst_quad <= 1e-10,
        format!(
            "grid vs direct max rel {worst_grid:.2e} (≤ 1e-9); Parseval {parseval:.2e}, \
             quadrature {worst_quad:.2e} (≤ 1e-10)"
        ),
    )
}

/// Mean-periodogram gaps at the given (w, μ) probes for each n.
fn mean_gaps(model: &ProcessModel, probes: &[(f64, f64)], ns: &[usize]) -> Vec<Vec<f64>> {
    let lines = model.theoretical_lines().unwrap();
    let mut out = vec![Vec::new(); probes.len()];
    for &n in ns {
        let exact = ExactMoments::new(model, n).unwrap();
        for (p, &(w, mu)) in probes.iter().enumerate() {
            let e = exact.mean_periodogram(mu + w, mu);
            let a = approx_mean_periodogram(&lines, mu + w, mu, n);
            out[p].push((e - a).norm());
        }
    }
    out
}

fn mean_periodogram_approximation() -> Outcome {
    let ns = [128usize, 256, 512, 1024];
    let nf: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
    let [w1, w2] = omegas();
    // Carrier model with irrational frequencies: the gap is bounded by
    // C·log n/n, but oscillates with the carrier phase, so its slope is
    // only reported.
    let two_carrier = ProcessModel::two_carrier_am();
    let probes = [(2.0 * w1, 0.3), (2.0 * w2, -1.0), (0.0, 0.7), (0.4, 0.2), (1.1, -0.5)];
    let gaps = mean_gaps(&two_carrier, &probes, &ns);
    let worst_norm = gaps
        .iter()
        .flat_map(|g| g.iter().zip(&nf).map(|(g, n)| g * n / n.ln()))
        .fold(0.0, f64::max);
    let info: Vec<String> = gaps
        .iter()
        .map(|g| format!("{:.2}", log_log_slope(&nf, g).unwrap()))
        .collect();
    // Periodically correlated model on the 2π/64 lattice: with n a multiple
    // of 128 the leakage terms are exact multiples of 1/n.
    let l = 2.0 * PI / 64.0;
    let lattice: ProcessModel = AmModelSpec::new(vec![
        Carrier::new(5.0 * l, vec![1.0, 0.5], 1.0),
        Carrier::new(9.0 * l, vec![1.0, 0.3], 1.0),
    ])
    .unwrap()
    .into();
    let probes = [
        (10.0 * l, 3.0 * l),
        (18.0 * l, -11.0 * l),
        (0.0, 7.0 * l),
        (4.0 * l, 2.0 * l),
        (11.0 * l, -5.0 * l),
    ];
    let slopes: Vec<f64> = mean_gaps(&lattice, &probes, &ns)
        .iter()
        .map(|g| log_log_slope(&nf, g).unwrap())
        .collect();
    let worst_slope = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    outcome(
        worst_norm <= 1.0 && worst_slope <= -0.8,
        format!(
            "two-carrier max n·gap/log n {worst_norm:.4} (≤ 1), slopes [{}] (informational); \
             lattice model worst slope {worst_slope:.3} (≤ −0.8)",
            info.join(", ")
        ),
    )
}

fn sup_deviation() -> Outcome {
    let plan = ExperimentPlan::new(ProcessModel::two_carrier_am(), vec![256, 512, 1024], 100, 2024);
    from_report(&run_sup_deviation(&plan).unwrap())
}

fn bias() -> Outcome {
    // One carrier with an MA(3) modulator: bias large enough to measure
    // against Monte Carlo error at n = 4096.
    let w = 0.6;
    let model: ProcessModel = AmModelSpec::new(vec![Carrier::new(w, vec![1.0, 0.0, 0.0, 0.8], 1.0)])
        .unwrap()
        .into();
    let plan = ExperimentPlan::new(model, vec![4096], 10_000, 77);
    let etas = [-w, 0.447, PI / 6.0 - w];
    let report =
        run_bias_experiment(&plan, 2.0 * w, &etas, &[0.1, 0.2, 0.4], InterceptMode::Known).unwrap();
    from_report(&report)
}

fn variance() -> Outcome {
    let [w1, w2] = omegas();
    let plan = ExperimentPlan::new(ProcessModel::two_carrier_am(), vec![4096], 2000, 4242);
    let on_line = run_variance_experiment(&plan, 2.0 * w1, &[0.3, -1.0], Some(2.0 * w2), InterceptMode::Known)
        .unwrap();
    let diagonal = run_variance_experiment(&plan, 0.0, &[0.0, 0.7], None, InterceptMode::Known).unwrap();
    let a = from_report(&on_line);
    let b = from_report(&diagonal);
    outcome(a.pass && b.pass, format!("b=2ω₁: {}; b=0 incl. η=0: {}", a.detail, b.detail))
}

fn equivalence() -> Outcome {
    let [w1, _] = omegas();
    let mut plan = ExperimentPlan::new(ProcessModel::two_carrier_am(), vec![4096], 1000, 99);
    plan.detection = two_peak_config(4097, true);
    from_report(&run_equivalence(&plan, 2.0 * w1, &[0.3, -1.0, 1.2]).unwrap())
}

fn normality() -> Outcome {
    let plan = ExperimentPlan::new(ProcessModel::two_carrier_am(), vec![2048], 5000, 31);
    let probes = [PI * 2f64.sqrt() / 20.0, PI * 3f64.sqrt() / 40.0, PI * 5f64.sqrt() / 80.0];
    from_report(&run_normality_check(&plan, &probes).unwrap())
}

fn random_series(rng: &mut ChaCha8Rng, n: usize) -> TimeSeries {
    TimeSeries::new((0..=n).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap()
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let models = [
        ProcessModel::two_carrier_am(),
        AmModelSpec::new(vec![
            Carrier { delay: 3, ..Carrier::new(0.3, vec![1.0, -0.4, 0.2], 2.0) },
            Carrier::new(2.9, vec![0.5, 0.5], 0.7),
        ])
        .unwrap()
        .into(),
    ];
    let mut sym: f64 = 0.0;
    let mut schwarz: f64 = 0.0;
    for m in &models {
        let lines = m.theoretical_lines().unwrap();
        for l in lines.lines() {
            let b = l.intercept;
            for _ in 0..200 {
                let mu = rng.random_range(-PI..PI);
                let f = l.density.eval(mu);
                sym = sym.max((f - lines.density(-b, -mu).conj()).norm());
                sym = sym.max((f - l.density.eval(wrap(-mu - b))).norm());
                let bound = lines.density(0.0, mu).re * lines.density(0.0, mu + b).re;
                schwarz = schwarz.max(f.norm_sqr() - bound);
            }
        }
    }
    let mut conj: f64 = 0.0;
    for _ in 0..50 {
        let n = 2 * rng.random_range(2..200);
        let x = random_series(&mut rng, n);
        let (b, l, m) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI), rng.random_range(-PI..PI));
        conj = conj.max((integrated_periodogram(&x, -b) - integrated_periodogram(&x, b).conj()).norm());
        conj = conj.max((periodogram(&x, l, m) - periodogram(&x, m, l).conj()).norm());
    }
    let model = ProcessModel::two_carrier_am();
    let deterministic = model.simulate(1024, 3).unwrap() == model.simulate(1024, 3).unwrap();
    // mirror detection: searching (−π, 0) mirrors the (0, π) result
    let mut mirror: f64 = 0.0;
    for seed in 0..10 {
        let x = model.simulate(1024, seed).unwrap();
        let pos = detect_lines(&x, &two_peak_config(1025, true)).unwrap();
        let neg_cfg = DetectionConfig { side: SearchSide::Negative, ..two_peak_config(1025, true) };
        let neg = detect_lines(&x, &neg_cfg).unwrap();
        if pos.lines.len() != neg.lines.len() {
            mirror = f64::INFINITY;
            continue;
        }
        for (p, q) in pos.lines.iter().zip(&neg.lines) {
            mirror = mirror.max(circular_distance(p.b_hat, -q.b_hat));
        }
    }
    let mirror_tol = 1e-4 / 1024.0;
    outcome(
        sym <= 1e-12 && schwarz <= 1e-12 && conj <= 1e-12 && deterministic && mirror <= mirror_tol,
        format!(
            "symmetry {sym:.1e}, Schwarz excess {schwarz:.1e}, conjugate {conj:.1e} (≤ 1e-12); \
             deterministic {deterministic}; mirror {mirror:.1e} (≤ {mirror_tol:.1e})"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("two-carrier frequency detection", frequency_detection),
        ("U_n exactness", u_n_exactness),
        ("mean periodogram approximation", mean_periodogram_approximation),
        ("sup deviation bound and rate", sup_deviation),
        ("smoothing bias", bias),
        ("line estimate variance", variance),
        ("estimated vs known intercepts", equivalence),
        ("joint normality of U_n", normality),
        ("property suites", properties),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if only.is_some_and(|k| k != i + 1) {
            continue;
        }
        let start = Instant::now();
        let o = f();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {} {name}: {verdict} [{:.1}s] {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
