//! 8-bit grayscale previews. Each image is min-max scaled on its own and
//! the scale is recorded in a JSON sidecar; PNGs are for looking at, not
//! for measuring.

use std::path::Path;

use serde::Serialize;
use thermolap_core::{frame_stats, ThermalFrame};

use crate::error::{CliError, Result};
use crate::fsio;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrayScale {
    pub width: usize,
    pub height: usize,
    /// Value mapped to 0.
    pub min: f64,
    /// Value mapped to 255. Equal to `min` for flat images, which export
    /// as all zeros.
    pub max: f64,
}

/// `round(255 (v - min) / (max - min))` per pixel.
pub fn to_gray(frame: &ThermalFrame) -> (Vec<u8>, GrayScale) {
    let s = frame_stats(frame);
    let span = s.max - s.min;
    let pixels = frame
        .data()
        .iter()
        .map(|&v| {
            if span > 0.0 {
                (255.0 * (v - s.min) / span).round() as u8
            } else {
                0
            }
        })
        .collect();
    let scale = GrayScale {
        width: frame.width(),
        height: frame.height(),
        min: s.min,
        max: s.max,
    };
    (pixels, scale)
}

pub fn encode_png(width: usize, height: usize, pixels: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let (w, h) = (
        u32::try_from(width).map_err(|_| CliError::Usage("image too wide for PNG".into()))?,
        u32::try_from(height).map_err(|_| CliError::Usage("image too tall for PNG".into()))?,
    );
    let mut enc = png::Encoder::new(&mut out, w, h);
    enc.set_color(png::ColorType::Grayscale);
    enc.set_depth(png::BitDepth::Eight);
    let err = |e: png::EncodingError| CliError::Format(format!("PNG encoding: {e}"));
    let mut writer = enc.write_header().map_err(err)?;
    writer.write_image_data(pixels).map_err(err)?;
    writer.finish().map_err(err)?;
    Ok(out)
}

/// Writes `path` and `path.json` (the scale).
pub fn export(path: &Path, frame: &ThermalFrame) -> Result<GrayScale> {
    let (pixels, scale) = to_gray(frame);
    fsio::write_atomic(path, &encode_png(frame.width(), frame.height(), &pixels)?)?;
    fsio::write_json(&fsio::sidecar(path, ".json"), &scale)?;
    Ok(scale)
}
