//! Model and plan files (TOML) and CSV input/output.
//!
//! CSV files start with `#` provenance lines, then a single header row.
//! Floating-point values are written with 17 significant digits.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::detect::DetectedLine;
use crate::error::{Error, Result};
use crate::mc::{Experiment, ExperimentPlan, RateReport};
use crate::model::{ProcessModel, TimeSeries};
use crate::oracle::MomentReport;
use crate::spectral::fourier::UGrid;
use crate::spectral::smoothing::LineEstimate;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

/// Parses and validates a model description.
///
/// ```toml
/// kind = "am"
/// [[carriers]]
/// frequency = 0.45345
/// ma = [1.0, 0.5]
/// noise_var = 1.0
/// ```
pub fn parse_model(text: &str) -> Result<ProcessModel> {
    let model: ProcessModel = toml::from_str(text).map_err(parse_err)?;
    model.validate()?;
    Ok(model)
}

pub fn load_model(path: &Path) -> Result<ProcessModel> {
    parse_model(&fs::read_to_string(path)?)
}

pub fn model_to_toml(model: &ProcessModel) -> Result<String> {
    toml::to_string(model).map_err(parse_err)
}

/// A plan file: the plan fields at top level, the model under `[model]` and
/// the experiment under `[experiment]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    #[serde(flatten)]
    pub plan: ExperimentPlan,
    pub experiment: Experiment,
}

pub fn parse_plan(text: &str) -> Result<PlanFile> {
    let file: PlanFile = toml::from_str(text).map_err(parse_err)?;
    file.plan.validate()?;
    Ok(file)
}

pub fn load_plan(path: &Path) -> Result<PlanFile> {
    parse_plan(&fs::read_to_string(path)?)
}

/// Writes `# line` for each provenance entry, then the header and rows.
pub fn write_csv<W: Write>(
    mut out: W,
    provenance: &[String],
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    for p in provenance {
        for line in p.lines() {
            writeln!(out, "# {line}")?;
        }
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header).map_err(parse_err)?;
    for r in rows {
        w.write_record(&r).map_err(parse_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `t, x`.
pub fn write_series<W: Write>(out: W, x: &TimeSeries, provenance: &[String]) -> Result<()> {
    write_csv(
        out,
        provenance,
        &["t", "x"],
        x.iter().map(|(t, v)| vec![t.to_string(), fmt_f64(v)]),
    )
}

/// Reads a series written by [`write_series`], or a single column of
/// values. With two columns the times must run consecutively from `−n/2`.
pub fn read_series<R: Read>(input: R) -> Result<TimeSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(parse_err)?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        let fields = match parsed {
            Ok(f) => f,
            // a non-numeric first record is the header
            Err(_) if i == 0 => continue,
            Err(e) => return Err(Error::Parse(format!("record {}: {e}", i + 1))),
        };
        match fields.as_slice() {
            [v] => values.push(*v),
            [t, v] => {
                times.push(*t);
                values.push(*v);
            }
            _ => {
                return Err(Error::Parse(format!(
                    "record {}: expected 1 or 2 columns, found {}",
                    i + 1,
                    fields.len()
                )))
            }
        }
    }
    if values.is_empty() {
        return Err(Error::Parse("series file holds no samples".into()));
    }
    if !times.is_empty() {
        if times.len() != values.len() {
            return Err(Error::Parse("mixed one- and two-column records".into()));
        }
        let half = (values.len() / 2) as f64;
        if let Some(k) = times.iter().enumerate().position(|(k, &t)| t != k as f64 - half) {
            return Err(Error::Parse(format!(
                "time index {} at record {} breaks the run −n/2, …, n/2",
                times[k],
                k + 1
            )));
        }
    }
    TimeSeries::new(values)
}

pub fn load_series(path: &Path) -> Result<TimeSeries> {
    read_series(fs::File::open(path)?)
}

/// Columns `b, re, im, abs` with `b = 2πj/N`, plus `mean_re, mean_im` when
/// the exact `EU_n` on the same grid is supplied.
pub fn write_ugrid<W: Write>(
    out: W,
    u: &UGrid,
    mean: Option<&[num_complex::Complex64]>,
    provenance: &[String],
) -> Result<()> {
    if let Some(m) = mean {
        if m.len() != u.len() {
            return Err(Error::InvalidArgument("mean grid length differs from U_n grid".into()));
        }
    }
    let header: &[&str] = if mean.is_some() {
        &["b", "re", "im", "abs", "mean_re", "mean_im"]
    } else {
        &["b", "re", "im", "abs"]
    };
    write_csv(
        out,
        provenance,
        header,
        u.values.iter().enumerate().map(|(j, z)| {
            let mut r = vec![
                fmt_f64(u.frequency(j)),
                fmt_f64(z.re),
                fmt_f64(z.im),
                fmt_f64(z.norm()),
            ];
            if let Some(m) = mean {
                r.push(fmt_f64(m[j].re));
                r.push(fmt_f64(m[j].im));
            }
            r
        }),
    )
}

/// Columns `eta, re, im`, plus `theory_re, theory_im` when a theoretical
/// curve of the same length is supplied.
pub fn write_line_estimate<W: Write>(
    out: W,
    est: &LineEstimate,
    theory: Option<&[num_complex::Complex64]>,
    provenance: &[String],
) -> Result<()> {
    if let Some(t) = theory {
        if t.len() != est.eta.len() {
            return Err(Error::InvalidArgument(
                "theoretical curve length differs from the η grid".into(),
            ));
        }
    }
    let header: &[&str] = if theory.is_some() {
        &["eta", "re", "im", "theory_re", "theory_im"]
    } else {
        &["eta", "re", "im"]
    };
    write_csv(
        out,
        provenance,
        header,
        est.eta.iter().zip(&est.values).enumerate().map(|(i, (e, v))| {
            let mut r = vec![fmt_f64(*e), fmt_f64(v.re), fmt_f64(v.im)];
            if let Some(t) = theory {
                r.push(fmt_f64(t[i].re));
                r.push(fmt_f64(t[i].im));
            }
            r
        }),
    )
}

/// Columns `b_hat, omega_hat, magnitude, refined`.
pub fn write_detected_lines<W: Write>(
    out: W,
    lines: &[DetectedLine],
    provenance: &[String],
) -> Result<()> {
    write_csv(
        out,
        provenance,
        &["b_hat", "omega_hat", "magnitude", "refined"],
        lines.iter().map(|l| {
            vec![
                fmt_f64(l.b_hat),
                l.omega_hat.map(fmt_f64).unwrap_or_default(),
                fmt_f64(l.magnitude),
                l.refined.to_string(),
            ]
        }),
    )
}

/// Reads the `b_hat` column of a file written by [`write_detected_lines`].
pub fn read_intercepts<R: Read>(input: R) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = rdr.headers().map_err(parse_err)?.clone();
    let col = headers
        .iter()
        .position(|h| h == "b_hat")
        .ok_or_else(|| Error::Parse("no b_hat column".into()))?;
    rdr.records()
        .map(|r| {
            let r = r.map_err(parse_err)?;
            r.get(col)
                .ok_or_else(|| Error::Parse("short record".into()))?
                .parse::<f64>()
                .map_err(parse_err)
        })
        .collect()
}

/// Columns `quantity, n, exact_re, exact_im, approx_re, approx_im, gap,
/// limit, claimed_order, pass`.
pub fn write_moment_reports<W: Write>(
    out: W,
    reports: &[MomentReport],
    provenance: &[String],
) -> Result<()> {
    write_csv(
        out,
        provenance,
        &[
            "quantity",
            "n",
            "exact_re",
            "exact_im",
            "approx_re",
            "approx_im",
            "gap",
            "limit",
            "claimed_order",
            "pass",
        ],
        reports.iter().map(|r| {
            vec![
                r.quantity.clone(),
                r.n.to_string(),
                fmt_f64(r.exact.re),
                fmt_f64(r.exact.im),
                fmt_f64(r.approx.re),
                fmt_f64(r.approx.im),
                fmt_f64(r.gap),
                fmt_f64(r.limit),
                r.claimed_order.clone(),
                r.pass.to_string(),
            ]
        }),
    )
}

/// Per-`n` rows: `n, count, median, mean, variance, se`.
pub fn write_rate_rows<W: Write>(out: W, report: &RateReport, provenance: &[String]) -> Result<()> {
    write_csv(
        out,
        provenance,
        &["n", "count", "median", "mean", "variance", "se"],
        report.rows.iter().map(|r| {
            vec![
                r.n.to_string(),
                r.count.to_string(),
                fmt_f64(r.median),
                fmt_f64(r.mean),
                fmt_f64(r.variance),
                fmt_f64(r.se),
            ]
        }),
    )
}

/// Claim rows: `claim, n, value, se, target, tolerance, pass`.
pub fn write_claim_checks<W: Write>(
    out: W,
    report: &RateReport,
    provenance: &[String],
) -> Result<()> {
    write_csv(
        out,
        provenance,
        &["claim", "n", "value", "se", "target", "tolerance", "pass"],
        report.checks.iter().map(|c| {
            vec![
                c.claim.clone(),
                c.n.map(|n| n.to_string()).unwrap_or_default(),
                fmt_f64(c.value),
                c.se.map(fmt_f64).unwrap_or_default(),
                fmt_f64(c.target),
                c.tolerance.clone(),
                c.pass.to_string(),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const AM: &str = r#"
kind = "am"

[[carriers]]
frequency = 0.4534498410585545
ma = [1.0, 0.5]
noise_var = 1.0

[[carriers]]
frequency = 0.7404804896930609
delay = 2
ma = [1.0, 0.3]
noise_var = 1.0
"#;

    #[test]
    fn model_round_trip() {
        let m = parse_model(AM).unwrap();
        match &m {
            ProcessModel::Am(s) => {
                assert_eq!(s.carriers.len(), 2);
                assert_eq!(s.carriers[1].delay, 2);
                assert_eq!(s.carriers[0].delay, 0);
            }
            _ => panic!("wrong kind"),
        }
        let back = parse_model(&model_to_toml(&m).unwrap()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn other_model_kinds() {
        let ma = r#"
kind = "ap-ma"
noise_var = 1.0
coeffs = [
  [{ re = 1.0 }],
  [{ re = 0.3, beta = 0.8 }, { re = 0.3, beta = -0.8 }],
]
"#;
        assert!(matches!(parse_model(ma).unwrap(), ProcessModel::ApMa(_)));
        let ar = r#"
kind = "ap-ar"
noise_var = 1.0
burn_in = 200
coeff = [{ re = 0.25, beta = 1.0 }, { re = 0.25, beta = -1.0 }]
"#;
        assert!(matches!(parse_model(ar).unwrap(), ProcessModel::ApAr(_)));
        let unstable = ar.replace("0.25", "0.6");
        assert!(parse_model(&unstable).is_err());
        assert!(parse_model("kind = \"nope\"").is_err());
        assert!(parse_model(&AM.replace("0.4534498410585545", "4.0")).is_err());
    }

    #[test]
    fn plan_file() {
        let text = format!(
            "n_values = [256, 512]\nreplicates = 50\nbase_seed = 9\n\n[experiment]\nkind = \"normality\"\nprobes = [0.2, 0.13]\n\n[detection]\ndelta = 0.05\n\n[model]\n{}",
            AM.replace("[[carriers]]", "[[model.carriers]]")
        );
        let p = parse_plan(&text).unwrap();
        assert_eq!(p.plan.n_values, vec![256, 512]);
        assert_eq!(p.plan.detection.delta, 0.05);
        assert!(matches!(p.experiment, Experiment::Normality { .. }));
        let bad = text.replace("replicates = 50", "replicates = 1");
        assert!(parse_plan(&bad).is_err());
    }

    #[test]
    fn series_round_trip() {
        let x = ProcessModel::two_carrier_am().simulate(16, 1).unwrap();
        let mut buf = Vec::new();
        write_series(&mut buf, &x, &["model am".into(), "seed 1".into()]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# model am\n# seed 1\nt,x\n-8,"));
        assert_eq!(read_series(buf.as_slice()).unwrap(), x);
    }

    #[test]
    fn series_input_errors() {
        assert!(read_series("t,x\n".as_bytes()).is_err());
        assert!(read_series("".as_bytes()).is_err());
        assert!(read_series("t,x\n-1,0.5\n0,1\n2,3\n".as_bytes()).is_err());
        let one = read_series("1.0\n2.0\n3.0\n".as_bytes()).unwrap();
        assert_eq!(one.values(), &[1.0, 2.0, 3.0]);
        assert!(read_series("1.0\n2.0\n".as_bytes()).is_err());
    }

    #[test]
    fn fields_with_commas_are_quoted() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[], &["a"], vec![vec!["max(1, 2)".to_string()]]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a\n\"max(1, 2)\"\n");
    }
}
