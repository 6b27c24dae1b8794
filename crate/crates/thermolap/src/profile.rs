//! Line profiles across a frame and its filter response.

use thermolap_core::frame::Mask;
use thermolap_core::ThermalFrame;

use crate::error::{CliError, Result};
use crate::grid_csv::fmt_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Line {
    Row(usize),
    Col(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileSample {
    pub index: usize,
    /// `index * pitch` when the pitch is known.
    pub position_m: Option<f64>,
    pub raw: f64,
    pub processed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Marker {
    pub index: usize,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineProfile {
    pub line: Line,
    pub samples: Vec<ProfileSample>,
    pub markers: Vec<Marker>,
}

fn along(frame: &ThermalFrame, line: Line) -> Vec<f64> {
    match line {
        Line::Row(y) => frame.row(y).to_vec(),
        Line::Col(x) => frame.column(x),
    }
}

/// Samples `raw` and `processed` along `line`. Each mask whose footprint
/// crosses the line contributes a marker at its centroid.
pub fn extract(
    raw: &ThermalFrame,
    processed: &ThermalFrame,
    line: Line,
    masks: &[(String, Mask)],
) -> Result<LineProfile> {
    raw.check_same_dims(processed)?;
    let (w, h) = raw.dims();
    let (idx, limit) = match line {
        Line::Row(y) => (y, h),
        Line::Col(x) => (x, w),
    };
    if idx >= limit {
        return Err(CliError::Usage(format!(
            "{} {idx} out of range 0..{limit}",
            if matches!(line, Line::Row(_)) { "row" } else { "column" }
        )));
    }
    let pitch = raw.pixel_pitch();
    let samples = along(raw, line)
        .into_iter()
        .zip(along(processed, line))
        .enumerate()
        .map(|(index, (r, p))| ProfileSample {
            index,
            position_m: pitch.map(|p| index as f64 * p),
            raw: r,
            processed: p,
        })
        .collect();
    let mut markers = Vec::new();
    for (label, m) in masks {
        if (m.width, m.height) != (w, h) {
            return Err(CliError::Format(format!(
                "mask {label} is {}x{}, frame is {w}x{h}",
                m.width, m.height
            )));
        }
        let crosses = match line {
            Line::Row(y) => (0..w).any(|x| m.get(x, y)),
            Line::Col(x) => (0..h).any(|y| m.get(x, y)),
        };
        if let (true, Some((cx, cy))) = (crosses, m.centroid()) {
            let c = match line {
                Line::Row(_) => cx,
                Line::Col(_) => cy,
            };
            markers.push(Marker {
                index: c.round() as usize,
                label: label.clone(),
            });
        }
    }
    Ok(LineProfile { line, samples, markers })
}

impl LineProfile {
    /// `index,position_m,raw,processed,marker`; empty cells for an unknown
    /// pitch or an unmarked sample. Several markers on one sample are joined
    /// with `;`.
    pub fn to_csv(&self) -> Vec<u8> {
        let mut out = String::from("index,position_m,raw,processed,marker\n");
        for s in &self.samples {
            let labels: Vec<&str> = self
                .markers
                .iter()
                .filter(|m| m.index == s.index)
                .map(|m| m.label.as_str())
                .collect();
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s.index,
                s.position_m.map(fmt_f64).unwrap_or_default(),
                fmt_f64(s.raw),
                fmt_f64(s.processed),
                labels.join(";")
            ));
        }
        out.into_bytes()
    }
}
