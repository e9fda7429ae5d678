//! `aplines`: simulate, detect support lines, estimate line spectra and run
//! the oracle and Monte Carlo checks from the command line.
//!
//! Exit status is 0 on success, 1 on usage or configuration errors and 2 when
//! a claim check fails.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use aplines::detect::{detect_lines, BlockRule, DetectionConfig, DetectionResult, SearchSide};
use aplines::io;
use aplines::mc;
use aplines::model::{ProcessModel, TimeSeries};
use aplines::oracle::{oracle_check, ExactMoments, OracleCheckConfig, MAX_EXACT_N};
use aplines::spectral::{
    circular_distance, fourier_grid, smoothed_line_estimate, u_grid, uniform_eta_grid, Kernel,
    KernelShape,
};
use aplines::Complex64;

#[derive(Parser, Debug)]
#[command(name = "aplines", version, about = "Support-line detection and line-spectral estimation")]
struct Cli {
    /// Print progress and defaults to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate a realization of a model.
    Simulate(SimulateArgs),
    /// Detect support-line intercepts in a series.
    Detect(DetectArgs),
    /// Estimate spectral densities along support lines.
    Estimate(EstimateArgs),
    /// Compare exact moments with their asymptotic approximations.
    OracleCheck(OracleArgs),
    /// Run a Monte Carlo experiment plan.
    Mc(McArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    model: PathBuf,
    /// Even sample size; the series has n + 1 values.
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the periodogram on the Fourier frequencies to this file.
    #[arg(long)]
    emit_figure: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Side {
    Positive,
    Negative,
}

#[derive(Args, Debug, Clone)]
struct DetectOptions {
    /// Detection level δ.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Block numerator c(n): `log`, `sqrt` or a positive constant.
    #[arg(long, default_value = "log")]
    blocks: String,
    /// Refinement grid density multiplier.
    #[arg(long, default_value_t = 4)]
    refine: usize,
    /// Skip the local refinement and report coarse-grid maxima.
    #[arg(long)]
    no_refine: bool,
    /// Coarse grid size N (default: step at most c(n)/(8n)).
    #[arg(long)]
    grid: Option<usize>,
    /// Radius around b = 0 excluded from the search (default 4c(n)/n).
    #[arg(long)]
    zero_exclusion: Option<f64>,
    /// Multiplier κ of (log n/n)^{1/4} in the threshold.
    #[arg(long, default_value_t = 1.0)]
    rate_scale: f64,
    /// Report at most this many lines.
    #[arg(long)]
    max_lines: Option<usize>,
    /// Also report ω̂ = b̂/2.
    #[arg(long)]
    half: bool,
    #[arg(long, value_enum, default_value = "positive")]
    side: Side,
}

impl DetectOptions {
    fn config(&self) -> Result<DetectionConfig> {
        let block = match self.blocks.as_str() {
            "log" => BlockRule::Log,
            "sqrt" => BlockRule::Sqrt,
            other => BlockRule::Constant(
                other
                    .parse()
                    .with_context(|| format!("--blocks must be log, sqrt or a number, got {other}"))?,
            ),
        };
        Ok(DetectionConfig {
            delta: self.delta,
            block,
            refine_factor: self.refine,
            refine: !self.no_refine,
            zero_exclusion: self.zero_exclusion,
            report_half: self.half,
            grid: self.grid,
            rate_scale: self.rate_scale,
            max_lines: self.max_lines,
            side: match self.side {
                Side::Positive => SearchSide::Positive,
                Side::Negative => SearchSide::Negative,
            },
        })
    }
}

#[derive(Args, Debug)]
struct DetectArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    opts: DetectOptions,
    #[arg(long)]
    out: PathBuf,
    /// Write the full U_n grid here.
    #[arg(long)]
    ugrid_out: Option<PathBuf>,
    /// Model used to add the exact EU_n to the grid dump.
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KernelName {
    Epanechnikov,
    Triangular,
    Parzen,
}

#[derive(Args, Debug)]
struct EstimateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Intercepts to estimate along (repeatable).
    #[arg(long = "intercept", allow_negative_numbers = true)]
    intercepts: Vec<f64>,
    /// Take intercepts from a `detect` output file.
    #[arg(long)]
    lines: Option<PathBuf>,
    /// Model whose theoretical densities are written alongside.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Four-curve comparison on every line of the model: theory, known
    /// intercept, coarse detection and refined detection.
    #[arg(long, requires = "model")]
    figure: bool,
    #[arg(long, value_enum, default_value = "epanechnikov")]
    kernel: KernelName,
    /// Bandwidth b_n (default n^{-1/5}).
    #[arg(long)]
    bandwidth: Option<f64>,
    /// Number of η points on (−π, π].
    #[arg(long, default_value_t = 256)]
    eta_points: usize,
    #[command(flatten)]
    detect: DetectOptions,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Allowed C in gap ≤ C·log n/n for the asymptotic mean formulas.
    #[arg(long, default_value_t = 1.0)]
    log_rate_constant: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct McArgs {
    #[arg(long)]
    plan: PathBuf,
    /// Override the plan's replicate count.
    #[arg(long)]
    replicates: Option<usize>,
    /// Override the plan's base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output prefix: writes PREFIX.csv, PREFIX_checks.csv and PREFIX.txt.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Outcome {
    Done,
    ClaimFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::ClaimFailed) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Simulate(a) => simulate(a, cli.verbose),
        Command::Detect(a) => detect(a, cli.verbose),
        Command::Estimate(a) => estimate(a, cli.verbose),
        Command::OracleCheck(a) => oracle(a, cli.verbose),
        Command::Mc(a) => run_mc(a, cli.verbose),
    }
}

fn check_input(path: &Path) -> Result<()> {
    if !path.is_file() {
        bail!("input file {} does not exist", path.display());
    }
    Ok(())
}

fn check_output(path: &Path) -> Result<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(dir) = parent {
        if !dir.is_dir() {
            bail!("output directory {} does not exist", dir.display());
        }
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn load_model(path: &Path) -> Result<ProcessModel> {
    check_input(path)?;
    io::load_model(path).with_context(|| format!("reading model {}", path.display()))
}

fn load_series(path: &Path) -> Result<TimeSeries> {
    check_input(path)?;
    io::load_series(path).with_context(|| format!("reading series {}", path.display()))
}

fn header(command: &str) -> Vec<String> {
    vec![format!("aplines {} {command}", env!("CARGO_PKG_VERSION"))]
}

fn model_provenance(model: &ProcessModel) -> Result<Vec<String>> {
    let text = io::model_to_toml(model)?;
    Ok(std::iter::once(format!("model kind {}", model.kind()))
        .chain(text.lines().map(|l| format!("model | {l}")))
        .collect())
}

fn detection_provenance(cfg: &DetectionConfig, n: usize) -> Vec<String> {
    vec![
        format!("n {n}"),
        format!(
            "delta {} rate_scale {} threshold {:.6}",
            cfg.delta,
            cfg.rate_scale,
            cfg.threshold(n)
        ),
        format!("c(n) {} = {:.6}", cfg.block.name(), cfg.c(n)),
        format!(
            "grid {} refine {} factor {}",
            cfg.grid_size(n),
            cfg.refine,
            cfg.refine_factor
        ),
        format!("zero_exclusion {:.6}", cfg.exclusion(n)),
        format!("side {:?} max_lines {:?}", cfg.side, cfg.max_lines),
    ]
}

fn simulate(a: &SimulateArgs, verbose: bool) -> Result<Outcome> {
    let model = load_model(&a.model)?;
    if a.n % 2 != 0 {
        bail!("--n must be even, got {}", a.n);
    }
    check_output(&a.out)?;
    if let Some(p) = &a.emit_figure {
        check_output(p)?;
    }
    let x = model.simulate(a.n, a.seed)?;
    let mut prov = header("simulate");
    prov.extend(model_provenance(&model)?);
    prov.push(format!("n {} seed {}", a.n, a.seed));
    io::write_series(create(&a.out)?, &x, &prov)?;
    if let Some(p) = &a.emit_figure {
        // periodogram I_n(λ, λ) on the Fourier frequencies 2πj/(n+1), j ≤ n/2
        let m = x.len();
        let f = fourier_grid(&x, 0.0, m)?;
        let norm = 1.0 / (2.0 * std::f64::consts::PI * m as f64);
        let rows = f.iter().enumerate().take(a.n / 2 + 1).map(|(j, z)| {
            vec![
                io::fmt_f64(2.0 * std::f64::consts::PI * j as f64 / m as f64),
                io::fmt_f64(z.norm_sqr() * norm),
            ]
        });
        let mut fp = prov.clone();
        fp.push("periodogram I_n(lambda, lambda)".into());
        io::write_csv(create(p)?, &fp, &["lambda", "periodogram"], rows)?;
    }
    if verbose {
        eprintln!("wrote {} samples to {}", x.len(), a.out.display());
    }
    Ok(Outcome::Done)
}

fn detect(a: &DetectArgs, verbose: bool) -> Result<Outcome> {
    let cfg = a.opts.config()?;
    let model = a.model.as_deref().map(load_model).transpose()?;
    check_input(&a.input)?;
    check_output(&a.out)?;
    if let Some(p) = &a.ugrid_out {
        check_output(p)?;
    }
    let x = load_series(&a.input)?;
    let n = x.n();
    cfg.validate(n)?;
    let result = detect_lines(&x, &cfg)?;
    let mut prov = header("detect");
    prov.push(format!("input {}", a.input.display()));
    prov.extend(detection_provenance(&cfg, n));
    prov.push(format!(
        "U_n(0) {} {}; suggested delta {:.6}",
        io::fmt_f64(result.u_zero.re),
        io::fmt_f64(result.u_zero.im),
        result.suggested_delta
    ));
    io::write_detected_lines(create(&a.out)?, &result.lines, &prov)?;
    eprintln!(
        "suggested delta (median block max + 5 MAD): {:.6}",
        result.suggested_delta
    );
    if let Some(p) = &a.ugrid_out {
        let u = u_grid(&x, result.grid)?;
        let mean = match &model {
            Some(m) if n <= MAX_EXACT_N => Some(ExactMoments::new(m, n)?.mean_un_grid(result.grid)?),
            _ => None,
        };
        io::write_ugrid(create(p)?, &u, mean.as_deref(), &prov)?;
    }
    if verbose {
        for l in &result.lines {
            eprintln!("line b̂ = {:.6} |U_n| = {:.6} refined = {}", l.b_hat, l.magnitude, l.refined);
        }
    }
    Ok(Outcome::Done)
}

fn kernel_shape(k: KernelName) -> KernelShape {
    match k {
        KernelName::Epanechnikov => KernelShape::Epanechnikov,
        KernelName::Triangular => KernelShape::Triangular,
        KernelName::Parzen => KernelShape::Parzen,
    }
}

fn nearest_detection(found: &DetectionResult, b: f64, radius: f64) -> Option<f64> {
    let flip = b < 0.0;
    let target = if flip { -b } else { b };
    found
        .lines
        .iter()
        .map(|l| l.b_hat)
        .filter(|&bh| circular_distance(bh, target) <= radius)
        .min_by(|p, q| circular_distance(*p, target).total_cmp(&circular_distance(*q, target)))
        .map(|bh| if flip { -bh } else { bh })
}

fn estimate(a: &EstimateArgs, verbose: bool) -> Result<Outcome> {
    let model = a.model.as_deref().map(load_model).transpose()?;
    check_input(&a.input)?;
    if let Some(p) = &a.lines {
        check_input(p)?;
    }
    check_output(&a.out)?;
    if !a.figure && a.intercepts.is_empty() && a.lines.is_none() {
        bail!("give --intercept, --lines or --figure");
    }
    if a.eta_points < 2 {
        bail!("--eta-points must be at least 2");
    }
    let x = load_series(&a.input)?;
    let n = x.n();
    let bandwidth = a.bandwidth.unwrap_or_else(|| Kernel::default_bandwidth(n));
    let kernel = Kernel::new(kernel_shape(a.kernel), bandwidth)?;
    let eta = uniform_eta_grid(a.eta_points);
    let lines = model.as_ref().map(|m| m.theoretical_lines()).transpose()?;

    let mut prov = header("estimate");
    prov.push(format!("input {}", a.input.display()));
    prov.push(format!("n {n} kernel {}", kernel.describe()));
    if let Some(m) = &model {
        prov.extend(model_provenance(m)?);
    }
    let f = |v: f64| io::fmt_f64(v);

    if a.figure {
        let lines = lines.as_ref().expect("--figure requires --model");
        let cfg = a.detect.config()?;
        let coarse_cfg = DetectionConfig {
            refine: false,
            grid: Some(cfg.grid.unwrap_or(n + 1)),
            ..cfg.clone()
        };
        let fine_cfg = DetectionConfig {
            grid: Some(cfg.grid.unwrap_or(n + 1)),
            ..cfg.clone()
        };
        coarse_cfg.validate(n)?;
        let coarse = detect_lines(&x, &coarse_cfg)?;
        let fine = detect_lines(&x, &fine_cfg)?;
        let radius = cfg.separation(n);
        prov.extend(detection_provenance(&coarse_cfg, n));
        prov.push("curves: theory, intercept known, coarse detection, refined detection".into());
        let mut rows = Vec::new();
        for line in lines.lines().iter().filter(|l| l.intercept >= 0.0) {
            let b = line.intercept;
            let theory: Vec<Complex64> = eta.iter().map(|&e| line.density.eval(e)).collect();
            let known = smoothed_line_estimate(&x, b, &kernel, &eta)?.values;
            let pick = |found: &DetectionResult| -> Result<(f64, Vec<Complex64>)> {
                let w = if b == 0.0 { Some(0.0) } else { nearest_detection(found, b, radius) };
                Ok(match w {
                    Some(w) => (w, smoothed_line_estimate(&x, w, &kernel, &eta)?.values),
                    None => (f64::NAN, vec![Complex64::new(f64::NAN, f64::NAN); eta.len()]),
                })
            };
            let (wc, c) = pick(&coarse)?;
            let (wf, r) = pick(&fine)?;
            if verbose {
                eprintln!("line {b:.6}: coarse {wc:.6}, refined {wf:.6}");
            }
            for i in 0..eta.len() {
                rows.push(vec![
                    f(b),
                    f(wc),
                    f(wf),
                    f(eta[i]),
                    f(theory[i].re),
                    f(theory[i].im),
                    f(known[i].re),
                    f(known[i].im),
                    f(c[i].re),
                    f(c[i].im),
                    f(r[i].re),
                    f(r[i].im),
                ]);
            }
        }
        io::write_csv(
            create(&a.out)?,
            &prov,
            &[
                "line_b",
                "coarse_b",
                "refined_b",
                "eta",
                "theory_re",
                "theory_im",
                "known_re",
                "known_im",
                "coarse_re",
                "coarse_im",
                "refined_re",
                "refined_im",
            ],
            rows,
        )?;
        return Ok(Outcome::Done);
    }

    let mut intercepts = a.intercepts.clone();
    if let Some(p) = &a.lines {
        intercepts.extend(io::read_intercepts(File::open(p)?)?);
    }
    if intercepts.is_empty() {
        bail!("no intercepts to estimate along");
    }
    let radius = a.detect.config()?.separation(n);
    let mut rows = Vec::new();
    for &b in &intercepts {
        let est = smoothed_line_estimate(&x, b, &kernel, &eta)?;
        for (i, (e, v)) in est.eta.iter().zip(&est.values).enumerate() {
            let mut r = vec![f(est.w), f(*e), f(v.re), f(v.im)];
            if let Some(l) = &lines {
                // detected intercepts carry O(1/n) error; overlay the nearest model line
                let t = l
                    .lines()
                    .iter()
                    .filter(|sl| circular_distance(sl.intercept, b) <= radius)
                    .min_by(|p, q| {
                        circular_distance(p.intercept, b).total_cmp(&circular_distance(q.intercept, b))
                    })
                    .map_or(Complex64::new(0.0, 0.0), |sl| sl.density.eval(eta[i]));
                r.push(f(t.re));
                r.push(f(t.im));
            }
            rows.push(r);
        }
    }
    let hdr: &[&str] = if lines.is_some() {
        &["intercept", "eta", "re", "im", "theory_re", "theory_im"]
    } else {
        &["intercept", "eta", "re", "im"]
    };
    io::write_csv(create(&a.out)?, &prov, hdr, rows)?;
    Ok(Outcome::Done)
}

fn oracle(a: &OracleArgs, verbose: bool) -> Result<Outcome> {
    let model = load_model(&a.model)?;
    check_output(&a.out)?;
    if a.n % 2 != 0 || a.n < 4 {
        bail!("--n must be even and at least 4, got {}", a.n);
    }
    if a.n > MAX_EXACT_N {
        bail!("--n is capped at {MAX_EXACT_N} for the exact oracles");
    }
    let cfg = OracleCheckConfig {
        log_rate_constant: a.log_rate_constant,
        ..OracleCheckConfig::default()
    };
    let reports = oracle_check(&model, a.n, &cfg)?;
    let mut prov = header("oracle-check");
    prov.extend(model_provenance(&model)?);
    prov.push(format!("n {} log_rate_constant {}", a.n, a.log_rate_constant));
    io::write_moment_reports(create(&a.out)?, &reports, &prov)?;
    let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
    if verbose || !failed.is_empty() {
        for r in &failed {
            eprintln!("FAIL {}: gap {:.3e} > {:.3e}", r.quantity, r.gap, r.limit);
        }
        eprintln!("{} of {} checks passed", reports.len() - failed.len(), reports.len());
    }
    Ok(if failed.is_empty() {
        Outcome::Done
    } else {
        Outcome::ClaimFailed
    })
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn run_mc(a: &McArgs, verbose: bool) -> Result<Outcome> {
    check_input(&a.plan)?;
    let mut file =
        io::load_plan(&a.plan).with_context(|| format!("reading plan {}", a.plan.display()))?;
    if let Some(r) = a.replicates {
        file.plan.replicates = r;
    }
    if let Some(s) = a.seed {
        file.plan.base_seed = s;
    }
    file.plan.validate()?;
    let prefix = a.out.clone().or_else(|| file.plan.output.clone());
    if let Some(p) = &prefix {
        check_output(p)?;
    }
    if verbose {
        eprintln!(
            "running {} with {} replicates at n = {:?}",
            file.experiment.name(),
            file.plan.replicates,
            file.plan.n_values
        );
    }
    let report = mc::run(&file.plan, &file.experiment)?;
    let summary = report.summary();
    print!("{summary}");
    if let Some(p) = &prefix {
        let mut prov = header("mc");
        prov.push(format!("plan {}", a.plan.display()));
        prov.push(format!(
            "experiment {} replicates {} base_seed {}",
            file.experiment.name(),
            file.plan.replicates,
            file.plan.base_seed
        ));
        prov.extend(model_provenance(&file.plan.model)?);
        io::write_rate_rows(create(&with_suffix(p, ".csv"))?, &report, &prov)?;
        io::write_claim_checks(create(&with_suffix(p, "_checks.csv"))?, &report, &prov)?;
        let mut t = create(&with_suffix(p, ".txt"))?;
        t.write_all(summary.as_bytes())?;
        t.flush()?;
    }
    Ok(if report.pass() {
        Outcome::Done
    } else {
        Outcome::ClaimFailed
    })
}
