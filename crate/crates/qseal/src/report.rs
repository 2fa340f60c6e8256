//! Report rendering: CSV and JSON-lines emission with a fixed schema.
//!
//! Floats are rendered with 12 significant digits, lines end with a single
//! `\n`, and files are written in one shot so a failed run never leaves a
//! partial report behind.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::{ReportRow, ScalingRow};

/// Column order of sweep and attack reports.
pub const SWEEP_HEADER: &str =
    "n,theta,alpha,nu,message,identify_p,bit_error,mi_bits,uniform_w,escape_p,coin_escape_p,trials,mc_identify,mc_stderr,max_z";

/// Column order of scaling reports.
pub const SCALING_HEADER: &str = "n,epsilon,p_max_exact,p_max_asymptotic,log_ratio";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Jsonl,
}

/// 12-significant-digit float rendering; deterministic across runs.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.11e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

fn sweep_line(row: &ReportRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        row.n,
        fmt_sig(row.theta),
        fmt_sig(row.alpha),
        fmt_sig(row.nu),
        row.message.map(|m| m.to_string()).unwrap_or_default(),
        fmt_sig(row.identify_p),
        fmt_sig(row.bit_error),
        fmt_sig(row.mi_bits),
        fmt_sig(row.uniform_w),
        fmt_sig(row.escape_p),
        fmt_sig(row.coin_escape_p),
        row.trials,
        fmt_opt(row.mc_identify),
        fmt_opt(row.mc_stderr),
        fmt_opt(row.max_z),
    )
}

/// Renders sweep rows in the requested format, header line included for CSV.
pub fn render_rows(rows: &[ReportRow], format: ReportFormat) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::ParameterOutOfRange {
            name: "rows",
            constraint: "[1, ..) entries",
            value: 0.0,
        });
    }
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            out.push_str(SWEEP_HEADER);
            out.push('\n');
            for row in rows {
                out.push_str(&sweep_line(row));
                out.push('\n');
            }
        }
        ReportFormat::Jsonl => {
            for row in rows {
                out.push_str(&serde_json::to_string(row).expect("row serializes"));
                out.push('\n');
            }
        }
    }
    Ok(out)
}

/// Renders scaling rows in the requested format.
pub fn render_scaling(rows: &[ScalingRow], format: ReportFormat) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::ParameterOutOfRange {
            name: "rows",
            constraint: "[1, ..) entries",
            value: 0.0,
        });
    }
    let mut out = String::new();
    match format {
        ReportFormat::Csv => {
            out.push_str(SCALING_HEADER);
            out.push('\n');
            for row in rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.n,
                    fmt_sig(row.epsilon),
                    fmt_sig(row.p_max_exact),
                    fmt_sig(row.p_max_asymptotic),
                    fmt_sig(row.log_ratio),
                ));
            }
        }
        ReportFormat::Jsonl => {
            for row in rows {
                out.push_str(&serde_json::to_string(row).expect("row serializes"));
                out.push('\n');
            }
        }
    }
    Ok(out)
}

/// Writes rendered content to `path`, or to stdout when `path` is `None`.
/// The content is rendered fully before any byte is written.
pub fn emit(content: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(path) => fs::write(path, content)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

/// Parses a CSV sweep report back into rows. Empty cells become `None`.
pub fn parse_csv(text: &str) -> Result<Vec<ReportRow>> {
    let bad = |message: &str| Error::SchemeFormat {
        path: "<csv>".into(),
        message: message.into(),
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty report"))?;
    if header != SWEEP_HEADER {
        return Err(bad("unexpected header"));
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 15 {
            return Err(bad("wrong field count"));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| bad(&format!("{e}: {s}")));
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                num(s).map(Some)
            }
        };
        rows.push(ReportRow {
            n: fields[0].parse().map_err(|_| bad("bad n"))?,
            theta: num(fields[1])?,
            alpha: num(fields[2])?,
            nu: num(fields[3])?,
            message: if fields[4].is_empty() {
                None
            } else {
                Some(fields[4].parse().map_err(|_| bad("bad message"))?)
            },
            identify_p: num(fields[5])?,
            bit_error: num(fields[6])?,
            mi_bits: num(fields[7])?,
            uniform_w: num(fields[8])?,
            escape_p: num(fields[9])?,
            coin_escape_p: num(fields[10])?,
            trials: fields[11].parse().map_err(|_| bad("bad trials"))?,
            mc_identify: opt(fields[12])?,
            mc_stderr: opt(fields[13])?,
            max_z: opt(fields[14])?,
        });
    }
    Ok(rows)
}
