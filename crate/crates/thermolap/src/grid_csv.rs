//! Plain rectangular CSV grids: one image row per line, comma separated,
//! with an optional single header row.

use std::path::Path;

use thermolap_core::ThermalFrame;

use crate::error::{CliError, Result};
use crate::fsio;

/// Fixed 17-significant-digit rendering used by every CSV writer.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Parses a grid. A first row with any non-numeric cell is taken as a
/// header and skipped; every later row must be numeric and as wide as the
/// first data row.
pub fn parse(text: &[u8]) -> Result<ThermalFrame> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text);
    let mut width = None;
    let mut data = Vec::new();
    let mut rows = 0usize;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Format(format!("CSV: {e}")))?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(CliError::Format(format!(
                    "CSV line {}: non-numeric cell",
                    record.position().map_or(i as u64 + 1, |p| p.line())
                )))
            }
        };
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(CliError::Format(format!(
                    "CSV row {} has {} cells, expected {w}",
                    rows + 1,
                    values.len()
                )))
            }
            _ => {}
        }
        data.extend(values);
        rows += 1;
    }
    let w = width.ok_or_else(|| CliError::Format("CSV holds no numeric rows".into()))?;
    ThermalFrame::new(w, rows, data).map_err(|e| CliError::Format(e.to_string()))
}

pub fn read(path: &Path) -> Result<ThermalFrame> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    parse(&bytes).map_err(|e| match e {
        CliError::Format(m) => CliError::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn encode(frame: &ThermalFrame) -> Vec<u8> {
    let mut out = String::new();
    for y in 0..frame.height() {
        let row: Vec<String> = frame.row(y).iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out.into_bytes()
}

pub fn write(path: &Path, frame: &ThermalFrame) -> Result<()> {
    fsio::write_atomic(path, &encode(frame))
}
