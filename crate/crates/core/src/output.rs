//! CSV and JSON rendering of sweep tables.
//!
//! Floats are written in the shortest form that parses back to the same
//! `f64`, so output is exact and identical across runs.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analysis::{LocalizationLength, LocalizationRow, PeakResult, RowOutcome, SweepRow, SweepTable, ThetaRow};
use crate::dispersion::Branch;
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "h,B,theta,n,branch,lambda_r,lambda_i,residual";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::domain("format", format!("expected csv|json, got {s:?}"))),
        }
    }
}

/// Shortest round-trip decimal form; integral values drop the trailing `.0`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:?}");
    match s.strip_suffix(".0") {
        Some(t) => t.to_owned(),
        None => s,
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

/// One CSV line without the newline. Error rows carry `error: <message>` in
/// the branch column and `NaN` for the numbers.
pub fn csv_row(row: &SweepRow) -> String {
    let (branch, lr, li, res) = match &row.outcome {
        RowOutcome::Root(r) => (r.branch.to_string(), r.lambda.re, r.lambda.im, r.residual),
        RowOutcome::Error(msg) => (format!("error: {msg}"), f64::NAN, f64::NAN, f64::NAN),
    };
    [
        format_float(row.h),
        format_float(row.blocking),
        format_float(row.theta),
        row.n.to_string(),
        csv_field(&branch),
        format_float(lr),
        format_float(li),
        format_float(res),
    ]
    .join(",")
}

fn json_row(row: &SweepRow) -> Value {
    let mut obj = json!({
        "h": row.h,
        "B": row.blocking,
        "theta": row.theta,
        "n": row.n,
    });
    let map = obj.as_object_mut().expect("object literal");
    match &row.outcome {
        RowOutcome::Root(r) => {
            map.insert("branch".into(), json!(r.branch.to_string()));
            map.insert("lambda_r".into(), json!(r.lambda.re));
            map.insert("lambda_i".into(), json!(r.lambda.im));
            map.insert("residual".into(), json!(r.residual));
        }
        RowOutcome::Error(msg) => {
            map.insert("branch".into(), Value::Null);
            map.insert("lambda_r".into(), Value::Null);
            map.insert("lambda_i".into(), Value::Null);
            map.insert("residual".into(), Value::Null);
            map.insert("error".into(), json!(msg));
        }
    }
    obj
}

pub fn write_table<W: Write + ?Sized>(out: &mut W, table: &SweepTable, format: Format) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}")?;
            for row in &table.rows {
                writeln!(out, "{}", csv_row(row))?;
            }
        }
        Format::Json => {
            let rows: Vec<Value> = table.rows.iter().map(json_row).collect();
            serde_json::to_writer_pretty(&mut *out, &rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Writes `table` to `path`.
pub fn emit(table: &SweepTable, format: Format, path: &Path) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = BufWriter::new(File::create(path).map_err(io)?);
    write_table(&mut out, table, format).map_err(io)?;
    out.flush().map_err(io)
}

pub const PEAK_HEADER: &str = "theta,B,n,branch,h_max,lambda_i_max,bracket_lo,bracket_hi";
pub const THETA_SCAN_HEADER: &str = "theta,B,n,branch,lambda_i_max,h_at_max,at_cap";
pub const LOCALIZATION_HEADER: &str = "h,B,theta,n,branch,lambda_i,localization_length";

/// Writes rows of floats and labels as CSV or as a JSON array of objects.
fn write_records<W: Write + ?Sized>(
    out: &mut W,
    header: &str,
    records: &[Vec<Value>],
    format: Format,
) -> std::io::Result<()> {
    let keys: Vec<&str> = header.split(',').collect();
    match format {
        Format::Csv => {
            writeln!(out, "{header}")?;
            for rec in records {
                let fields: Vec<String> = rec.iter().map(csv_value).collect();
                writeln!(out, "{}", fields.join(","))?;
            }
        }
        Format::Json => {
            let rows: Vec<Value> = records
                .iter()
                .map(|rec| {
                    Value::Object(
                        keys.iter()
                            .zip(rec)
                            .map(|(k, v)| ((*k).to_owned(), v.clone()))
                            .collect(),
                    )
                })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

fn csv_value(v: &Value) -> String {
    match v {
        Value::Number(x) if x.is_f64() => format_float(x.as_f64().unwrap_or(f64::NAN)),
        Value::Number(x) => x.to_string(),
        Value::String(s) => csv_field(s),
        Value::Bool(b) => b.to_string(),
        Value::Null => "NaN".into(),
        other => csv_field(&other.to_string()),
    }
}

pub fn write_peak<W: Write + ?Sized>(
    out: &mut W,
    peak: &PeakResult,
    theta: f64,
    blocking: f64,
    n: usize,
    branch: Branch,
    format: Format,
) -> std::io::Result<()> {
    let rec = vec![
        json!(theta),
        json!(blocking),
        json!(n),
        json!(branch.to_string()),
        json!(peak.h_max),
        json!(peak.lambda_i_max),
        json!(peak.bracket.0),
        json!(peak.bracket.1),
    ];
    write_records(out, PEAK_HEADER, &[rec], format)
}

pub fn write_theta_scan<W: Write + ?Sized>(
    out: &mut W,
    rows: &[ThetaRow],
    blocking: f64,
    n: usize,
    format: Format,
) -> std::io::Result<()> {
    let records: Vec<Vec<Value>> = rows
        .iter()
        .map(|r| {
            vec![
                json!(r.theta),
                json!(blocking),
                json!(n),
                json!(r.branch.to_string()),
                json!(r.lambda_i_max),
                json!(r.h_at_max),
                json!(r.at_cap),
            ]
        })
        .collect();
    write_records(out, THETA_SCAN_HEADER, &records, format)
}

/// Localization lengths; the infinite marker is written as `inf` (CSV) or `"inf"` (JSON).
pub fn write_localization<W: Write + ?Sized>(
    out: &mut W,
    rows: &[LocalizationRow],
    format: Format,
) -> std::io::Result<()> {
    let records: Vec<Vec<Value>> = rows
        .iter()
        .filter_map(|r| {
            let root = r.row.root()?;
            let length = match r.length {
                LocalizationLength::Finite(x) => json!(x),
                LocalizationLength::Infinite => json!("inf"),
            };
            Some(vec![
                json!(r.row.h),
                json!(r.row.blocking),
                json!(r.row.theta),
                json!(r.row.n),
                json!(root.branch.to_string()),
                json!(root.lambda.im),
                length,
            ])
        })
        .collect();
    write_records(out, LOCALIZATION_HEADER, &records, format)
}

/// One parsed CSV row: `(h, B, theta, n, branch, lambda_r, lambda_i, residual)`.
pub type CsvRecord = (f64, f64, f64, usize, String, f64, f64, f64);

/// Parses CSV written by [`write_table`], skipping error rows.
pub fn read_csv(text: &str) -> Result<Vec<CsvRecord>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::domain("csv", "missing or unexpected header"));
    }
    let bad = |line: &str| Error::domain("csv", format!("malformed row {line:?}"));
    let float = |s: &str, line: &str| s.parse::<f64>().map_err(|_| bad(line));
    let mut out = Vec::new();
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            if line.contains("error: ") {
                continue;
            }
            return Err(bad(line));
        }
        if fields[4].starts_with("error") || fields[4].starts_with("\"error") {
            continue;
        }
        out.push((
            float(fields[0], line)?,
            float(fields[1], line)?,
            float(fields[2], line)?,
            fields[3].parse().map_err(|_| bad(line))?,
            fields[4].to_owned(),
            float(fields[5], line)?,
            float(fields[6], line)?,
            float(fields[7], line)?,
        ));
    }
    Ok(out)
}
