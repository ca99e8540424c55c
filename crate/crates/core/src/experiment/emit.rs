use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CaseStudyReport, ComparisonRow};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "sweep_value,analytic,sim_mean,sim_std_err,rel_error,jensen_ok,runs,seed";

pub const CASE_STUDY_HEADER: &str = "p22,k1,t_peering,t_x_tier1,t_tier1,t_tier1_tier2,t_transit,t_total,\
sim_mean,sim_std_err,rel_error,runs,seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::domain(format!("unknown output format `{other}`"))),
        }
    }
}

/// Shortest decimal form of `v` rounded to 9 significant digits.
pub fn format_sig9(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    round9(v).to_string()
}

fn round9(v: f64) -> f64 {
    if v.is_finite() {
        format!("{v:.8e}").parse().expect("formatted float parses")
    } else {
        v
    }
}

pub fn write_csv(rows: &[ComparisonRow], mut out: impl Write) -> Result<()> {
    let mut text = String::new();
    writeln!(text, "{CSV_HEADER}").unwrap();
    for r in rows {
        writeln!(
            text,
            "{},{},{},{},{},{},{},{}",
            format_sig9(r.sweep_value),
            format_sig9(r.analytic),
            format_sig9(r.sim_mean),
            format_sig9(r.sim_std_err),
            format_sig9(r.rel_error),
            r.jensen_ok,
            r.runs,
            r.seed
        )
        .unwrap();
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn rounded(r: &ComparisonRow) -> ComparisonRow {
    ComparisonRow {
        sweep_value: round9(r.sweep_value),
        analytic: round9(r.analytic),
        sim_mean: round9(r.sim_mean),
        sim_std_err: round9(r.sim_std_err),
        rel_error: round9(r.rel_error),
        ..r.clone()
    }
}

/// Array of row objects; NaN becomes `null`.
pub fn write_json(rows: &[ComparisonRow], mut out: impl Write) -> Result<()> {
    let rows: Vec<ComparisonRow> = rows.iter().map(rounded).collect();
    serde_json::to_writer_pretty(&mut out, &rows).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn emit(rows: &[ComparisonRow], format: OutputFormat, path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::domain("nothing to emit"));
    }
    let mut out = create(path)?;
    match format {
        OutputFormat::Csv => write_csv(rows, &mut out)?,
        OutputFormat::Json => write_json(rows, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn parse_field<T: FromStr>(line: usize, name: &str, field: &str) -> Result<T> {
    field.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad {name} `{field}`"),
    })
}

fn parse_number(line: usize, name: &str, field: &str) -> Result<f64> {
    match field {
        "NaN" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        _ => parse_field(line, name, field),
    }
}

/// Reads rows written by [`write_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<ComparisonRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                msg: "missing or unexpected header".into(),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(idx, l)| {
            let line = idx + 1;
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 8 {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected 8 fields, found {}", f.len()),
                });
            }
            Ok(ComparisonRow {
                sweep_value: parse_number(line, "sweep_value", f[0])?,
                analytic: parse_number(line, "analytic", f[1])?,
                sim_mean: parse_number(line, "sim_mean", f[2])?,
                sim_std_err: parse_number(line, "sim_std_err", f[3])?,
                rel_error: parse_number(line, "rel_error", f[4])?,
                jensen_ok: parse_field(line, "jensen_ok", f[5])?,
                runs: parse_field(line, "runs", f[6])?,
                seed: parse_field(line, "seed", f[7])?,
                error: None,
            })
        })
        .collect()
}

pub fn write_case_study_csv(report: &CaseStudyReport, mut out: impl Write) -> Result<()> {
    let mut text = String::new();
    writeln!(text, "{CASE_STUDY_HEADER}").unwrap();
    let nan = f64::NAN;
    for c in &report.cells {
        let e = c.estimate;
        let parts = [
            e.map_or(nan, |e| e.t_peering),
            e.map_or(nan, |e| e.t_x_tier1),
            e.map_or(nan, |e| e.t_tier1),
            e.map_or(nan, |e| e.t_tier1_tier2),
            e.map_or(nan, |e| e.t_transit),
            e.map_or(nan, |e| e.t_total),
            c.sim.map_or(nan, |s| s.mean),
            c.sim.map_or(nan, |s| s.std_err),
            c.rel_error,
        ];
        write!(text, "{},{}", format_sig9(c.p22), c.k1).unwrap();
        for p in parts {
            write!(text, ",{}", format_sig9(p)).unwrap();
        }
        let runs = c.sim.map_or(0, |s| s.runs);
        writeln!(text, ",{runs},{}", c.seed).unwrap();
    }
    out.write_all(text.as_bytes())?;
    Ok(())
}

pub fn emit_case_study(report: &CaseStudyReport, format: OutputFormat, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    match format {
        OutputFormat::Csv => write_case_study_csv(report, &mut out)?,
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, report).map_err(std::io::Error::from)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}
