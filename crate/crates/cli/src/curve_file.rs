//! Curve CSV files: `omega,r_star,log_bf10` rows followed by a `#` summary.
//!
//! The summary is computed from the rounded values that are written, so
//! reading a file back and summarizing it again reproduces the block.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use bffkit::evidence::crossings;
use bffkit::{BffCurve64, CrossingDirection};

use crate::error::{CliError, Result};
use crate::format::{fmt_num, round_sig};

pub const HEADER: &str = "omega,r_star,log_bf10";

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRows {
    pub omega: Vec<f64>,
    pub r_star: Vec<f64>,
    pub value: Vec<f64>,
}

impl CurveRows {
    pub fn from_curve(curve: &BffCurve64) -> Self {
        CurveRows {
            omega: curve.points.iter().map(|p| round_sig(p.omega)).collect(),
            r_star: curve.points.iter().map(|p| round_sig(p.r_star)).collect(),
            value: curve.points.iter().map(|p| round_sig(p.curve_value())).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelCrossing {
    pub level: f64,
    pub omega: Option<f64>,
    pub direction: CrossingDirection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub omega_star: f64,
    pub r_star: f64,
    pub max_log_bf10: f64,
    pub crossings: Vec<LevelCrossing>,
}

/// Maximum (first on ties) and level crossings of the rows.
pub fn summarize(rows: &CurveRows, levels: &[f64]) -> Option<Summary> {
    let mut best: Option<usize> = None;
    for (i, v) in rows.value.iter().enumerate() {
        if best.is_none_or(|b| *v > rows.value[b]) {
            best = Some(i);
        }
    }
    let b = best?;
    let crossings = crossings(&rows.omega, &rows.value, levels)
        .into_iter()
        .map(|c| LevelCrossing {
            level: c.level,
            omega: c.omega.map(round_sig),
            direction: c.direction,
        })
        .collect();
    Some(Summary {
        omega_star: rows.omega[b],
        r_star: rows.r_star[b],
        max_log_bf10: rows.value[b],
        crossings,
    })
}

fn direction_name(d: CrossingDirection) -> &'static str {
    match d {
        CrossingDirection::Below => "below",
        CrossingDirection::Above => "above",
    }
}

pub fn render_summary(s: &Summary) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "omega_star={}", fmt_num(s.omega_star));
    let _ = writeln!(out, "r_star={}", fmt_num(s.r_star));
    let _ = writeln!(out, "max_log_bf10={}", fmt_num(s.max_log_bf10));
    for c in &s.crossings {
        let omega = c.omega.map(fmt_num).unwrap_or_else(|| "none".into());
        let _ = writeln!(
            out,
            "crossing level={} omega={} direction={}",
            fmt_num(c.level),
            omega,
            direction_name(c.direction)
        );
    }
    out
}

/// Full file text: header, rows, then the summary and `extra` lines, each
/// prefixed with `# `.
pub fn render(rows: &CurveRows, summary: &Summary, extra: &[String]) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for i in 0..rows.omega.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_num(rows.omega[i]),
            fmt_num(rows.r_star[i]),
            fmt_num(rows.value[i])
        );
    }
    for line in render_summary(summary).lines().map(str::to_owned).chain(extra.iter().cloned()) {
        let _ = writeln!(out, "# {line}");
    }
    out
}

pub fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Data rows of a curve file, ignoring `#` lines.
pub fn read(path: &Path) -> Result<CurveRows> {
    let parse_err = |row: usize, detail: String| CliError::Parse {
        path: path.to_path_buf(),
        row,
        detail,
    };
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| parse_err(0, e.to_string()))?;
    let headers = reader.headers().map_err(|e| parse_err(0, e.to_string()))?;
    if headers.iter().collect::<Vec<_>>().join(",") != HEADER {
        return Err(parse_err(0, format!("expected header '{HEADER}'")));
    }
    let mut rows = CurveRows {
        omega: Vec::new(),
        r_star: Vec::new(),
        value: Vec::new(),
    };
    for (i, rec) in reader.deserialize::<(f64, f64, f64)>().enumerate() {
        let (w, r, v) = rec.map_err(|e| parse_err(i + 1, e.to_string()))?;
        rows.omega.push(w);
        rows.r_star.push(r);
        rows.value.push(v);
    }
    Ok(rows)
}
