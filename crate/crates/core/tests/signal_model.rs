use std::f64::consts::PI;

use aplines::model::rng::{standard_normal, stream_rng};
use aplines::model::{
    AmModelSpec, ApArSpec, ApMaSpec, ApSequence, Carrier, ProcessModel, TimeSeries,
};
use aplines::oracle::ExactMoments;
use aplines::Complex64;

fn two_carrier() -> ProcessModel {
    ProcessModel::two_carrier_am()
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let r = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / r;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (r - 1.0);
    (m, (v / r).sqrt())
}

#[test]
fn identity_carrier_returns_raw_draws() {
    let m: ProcessModel = AmModelSpec::new(vec![Carrier::new(0.0, vec![1.0], 1.0)]).unwrap().into();
    let x = m.simulate(4, 17).unwrap();
    let mut rng = stream_rng(17, 0);
    let draws: Vec<f64> = (0..5).map(|_| standard_normal(&mut rng)).collect();
    assert_eq!(x.values(), &draws[..]);
}

#[test]
fn two_carrier_sample_variance_near_time_average() {
    // E X_t² averaged over t is (1.25 + 1.09)/2 = 1.17
    let vars: Vec<f64> = (0..40)
        .map(|s| {
            let x = two_carrier().simulate(1024, s).unwrap();
            x.values().iter().map(|v| v * v).sum::<f64>() / x.len() as f64
        })
        .collect();
    let (m, se) = mean_and_se(&vars);
    assert!((m - 1.17).abs() < 4.0 * se + 5e-3, "mean {m} se {se}");
}

#[test]
fn simulation_is_deterministic_per_seed() {
    let models = [
        two_carrier(),
        ApMaSpec::new(vec![ApSequence::constant(1.0), ApSequence::cosine(0.4, 0.7)], 1.5)
            .unwrap()
            .into(),
        ApArSpec::new(ApSequence::cosine(0.5, 1.0), 1.0, 200).unwrap().into(),
    ];
    for m in &models {
        assert_eq!(m.simulate(256, 9).unwrap(), m.simulate(256, 9).unwrap());
        assert_ne!(m.simulate(256, 9).unwrap(), m.simulate(256, 10).unwrap());
    }
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(two_carrier().simulate(1023, 0).is_err());
    assert!(AmModelSpec::new(vec![Carrier::new(3.5, vec![1.0], 1.0)]).is_err());
    assert!(AmModelSpec::new(vec![Carrier::new(-0.1, vec![1.0], 1.0)]).is_err());
    assert!(ApMaSpec::new(vec![ApSequence::constant(1.0)], 0.0).is_err());
    assert!(ApArSpec::new(ApSequence::constant(1.0), 1.0, 500).is_err());
    assert!(ApArSpec::new(ApSequence::cosine(1.0, 1.0), 1.0, 500).is_err());
    assert!(ApArSpec::new(ApSequence::constant(0.5), 1.0, 50).is_err());
}

#[test]
fn stationary_ma_variance() {
    // constant coefficients [1, 0.6, −0.3]: lag-0 autocovariance 1.45·σ²
    let m: ProcessModel = ApMaSpec::new(
        vec![ApSequence::constant(1.0), ApSequence::constant(0.6), ApSequence::constant(-0.3)],
        2.0,
    )
    .unwrap()
    .into();
    let gammas: Vec<f64> = (0..40)
        .map(|s| {
            let x = m.simulate(2048, s).unwrap();
            x.values().iter().map(|v| v * v).sum::<f64>() / x.len() as f64
        })
        .collect();
    let (g, se) = mean_and_se(&gammas);
    assert!((g - 2.9).abs() < 4.0 * se, "γ(0) {g} se {se}");
    assert_eq!(m.covariance(0, 5, 5), 2.9);
}

#[test]
fn unit_ma_is_white_noise() {
    let m = ProcessModel::white_noise(1.0).unwrap();
    assert_eq!(m.covariance(0, 3, 3), 1.0);
    assert_eq!(m.covariance(0, 3, 4), 0.0);
    let x = m.simulate(8, 4).unwrap();
    let mut rng = stream_rng(4, 0);
    let draws: Vec<f64> = (0..9).map(|_| standard_normal(&mut rng)).collect();
    assert_eq!(x.values(), &draws[..]);
}

#[test]
fn zero_ar_coefficient_gives_noise() {
    let ar: ProcessModel = ApArSpec::new(ApSequence::constant(0.0), 1.0, 100).unwrap().into();
    let white = ProcessModel::white_noise(1.0).unwrap();
    let x = ar.simulate(64, 3).unwrap();
    // the noise driving the window is the tail of the burn-in stream
    let mut rng = stream_rng(3, 0);
    let draws: Vec<f64> = (0..100 + 65).map(|_| standard_normal(&mut rng)).collect();
    assert_eq!(x.values(), &draws[100..]);
    assert_eq!(ar.covariance(64, 2, 2), white.covariance(64, 2, 2));
}

#[test]
fn stationary_ar_lag_one_autocorrelation() {
    let m: ProcessModel = ApArSpec::new(ApSequence::constant(0.5), 1.0, 500).unwrap().into();
    let rhos: Vec<f64> = (0..20)
        .map(|s| {
            let x = m.simulate(8192, s).unwrap();
            let v = x.values();
            let num: f64 = v.windows(2).map(|w| w[0] * w[1]).sum();
            let den: f64 = v.iter().map(|a| a * a).sum();
            num / den
        })
        .collect();
    let (r, se) = mean_and_se(&rhos);
    assert!((r - 0.5).abs() < 4.0 * se + 2e-3, "ρ(1) {r} se {se}");
    // exact stationary covariance a·σ²/(1 − a²)
    let c = m.covariance(8192, 10, 11);
    assert!((c - 0.5 / 0.75).abs() < 1e-12, "{c}");
}

#[test]
fn periodic_ar_mean_un_has_decaying_harmonic_lines() {
    // a_n = 0.5cos(n): the variance recursion only involves a_n², so the
    // diagonal r_{k,k} carries the even harmonics 0, ±2, ±4, …
    let m: ProcessModel = ApArSpec::new(ApSequence::cosine(0.5, 1.0), 1.0, 500).unwrap().into();
    let ex = ExactMoments::new(&m, 1024).unwrap();
    let mag = |b: f64| ex.mean_un(b).norm();
    let (l0, l2, l4) = (mag(0.0), mag(2.0), mag(4.0));
    assert!(l0 > l2 && l2 > l4 && l4 > 3e-3, "{l0} {l2} {l4}");
    assert!((mag(-2.0) - l2).abs() < 1e-12);
    // odd harmonics and points between lines see only O(1/n) leakage,
    // while the lines themselves settle
    let big = ExactMoments::new(&m, 4096).unwrap();
    for b in [1.0, 3.0, 0.5, 1.5] {
        assert!(big.mean_un(b).norm() < 0.35 * mag(b), "b = {b}");
    }
    assert!((big.mean_un(2.0).norm() - l2).abs() < 0.05 * l2);
}

#[test]
fn two_carrier_covariance_values() {
    let m = two_carrier();
    assert!((m.covariance(0, 0, 0) - 2.34).abs() < 1e-12);
    for (s, t) in [(0, 2), (5, 9), (-3, 3)] {
        assert_eq!(m.covariance(0, s, t), 0.0);
    }
    for (s, t) in [(4, 7), (7, 4), (-12, 30)] {
        assert_eq!(m.covariance(0, s, t), m.covariance(0, t, s));
    }
}

#[test]
fn two_carrier_line_spectrum() {
    let lines = two_carrier().theoretical_lines().unwrap();
    let (w1, w2) = (PI / (4.0 * 3f64.sqrt()), PI / (3.0 * 2f64.sqrt()));
    let mut bs = lines.intercepts();
    bs.sort_by(f64::total_cmp);
    let want = [-2.0 * w2, -2.0 * w1, 0.0, 2.0 * w1, 2.0 * w2];
    assert_eq!(bs.len(), 5);
    for (b, w) in bs.iter().zip(want) {
        assert!((b - w).abs() < 1e-12);
    }
    let mass = |b: f64| lines.line(b).unwrap().density.integral();
    assert!((mass(2.0 * w1) - Complex64::new(0.3125, 0.0)).norm() < 1e-12);
    assert!((mass(2.0 * w2) - Complex64::new(0.2725, 0.0)).norm() < 1e-12);
    assert!((mass(0.0) - Complex64::new(1.17, 0.0)).norm() < 1e-12);
    assert!(lines.line(w1 + w2).is_none() && lines.line(w2 - w1).is_none());
    // f_{2w_1}(μ) = (1/8π)(1.25 + cos(μ + w_1))
    for mu in [-2.0, 0.1, 1.3] {
        let want = (1.25 + (mu + w1).cos()) / (8.0 * PI);
        assert!((lines.density(2.0 * w1, mu) - Complex64::new(want, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn unmodulated_carrier_has_only_the_diagonal() {
    let m: ProcessModel = AmModelSpec::new(vec![Carrier::new(0.0, vec![1.0, 0.4], 1.0)]).unwrap().into();
    assert_eq!(m.theoretical_lines().unwrap().intercepts(), vec![0.0]);
}

#[test]
fn ar_has_no_closed_form_lines() {
    let m: ProcessModel = ApArSpec::new(ApSequence::constant(0.3), 1.0, 200).unwrap().into();
    assert!(m.theoretical_lines().is_err());
}

#[test]
fn covariance_bound_values() {
    let b = two_carrier().covariance_bound().unwrap();
    assert!((b.at(0) - 1.17).abs() < 1e-12);
    assert_eq!(b.at(2), 0.0);
    assert_eq!(b.at(-2), 0.0);
    // c(±1) = max(½|cos w₁·0.5 + cos w₂·0.3|, ¼·0.5, ¼·0.3)
    let (w1, w2) = (PI / (4.0 * 3f64.sqrt()), PI / (3.0 * 2f64.sqrt()));
    let c1 = (0.5 * (0.5 * w1.cos() + 0.3 * w2.cos())).max(0.125);
    assert!((b.at(1) - c1).abs() < 1e-12 && (b.at(-1) - c1).abs() < 1e-12);
    assert!((b.sum - (1.17 + 2.0 * c1)).abs() < 1e-12);

    let w = ProcessModel::white_noise(1.0).unwrap().covariance_bound().unwrap();
    assert_eq!(w.at(0), 1.0);
    assert_eq!(w.at(1), 0.0);
    assert_eq!(w.sum, 1.0);
}

#[test]
fn sample_covariance_matches_exact() {
    let m: ProcessModel = AmModelSpec::new(vec![
        Carrier { delay: 2, ..Carrier::new(0.9, vec![1.0, -0.7], 1.0) },
        Carrier::new(2.1, vec![0.8, 0.4, 0.3], 0.5),
    ])
    .unwrap()
    .into();
    let n = 16;
    let pairs = [(0i64, 0i64), (3, 4), (-5, -3), (2, 7), (8, 8)];
    let reps = 10_000;
    let mut prods = vec![Vec::with_capacity(reps); pairs.len()];
    for r in 0..reps {
        let x = m.simulate(n, r as u64).unwrap();
        for (p, &(s, t)) in pairs.iter().enumerate() {
            prods[p].push(x.get(s).unwrap() * x.get(t).unwrap());
        }
    }
    for (p, &(s, t)) in pairs.iter().enumerate() {
        let (mean, se) = mean_and_se(&prods[p]);
        let exact = m.covariance(n, s, t);
        assert!((mean - exact).abs() <= 4.0 * se, "({s},{t}): {mean} vs {exact} ± {se}");
    }
}

#[test]
fn series_layout() {
    let x = TimeSeries::from_fn(4, |t| t as f64).unwrap();
    assert_eq!(x.values(), &[-2.0, -1.0, 0.0, 1.0, 2.0]);
    assert_eq!(x.get(-2), Some(-2.0));
    assert_eq!(x.get(3), None);
    assert!(TimeSeries::new(vec![1.0, 2.0]).is_err());
}
