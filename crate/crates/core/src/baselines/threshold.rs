use alloc::format;

use crate::error::{Error, Result};
use crate::frame::{Mask, ThermalFrame};

/// Pixels at or above `cutoff` °C.
pub fn hard_threshold(frame: &ThermalFrame, cutoff: f64) -> Result<Mask> {
    if !cutoff.is_finite() {
        return Err(Error::Domain(format!("cutoff must be finite, got {cutoff}")));
    }
    Ok(Mask {
        width: frame.width(),
        height: frame.height(),
        data: frame.data().iter().map(|&v| v >= cutoff).collect(),
    })
}

/// `clamp((frame - sound_temperature) / expected_delta, 0, 1)`.
///
/// A simplified contrast reconstruction: the caller supplies the intact-area
/// temperature and the expected defect-vs-sound difference directly.
pub fn contrast_reconstruct(frame: &ThermalFrame, sound_temperature: f64, expected_delta: f64) -> Result<ThermalFrame> {
    if expected_delta == 0.0 || !expected_delta.is_finite() {
        return Err(Error::Domain(format!(
            "expected delta must be finite and nonzero, got {expected_delta}"
        )));
    }
    if !sound_temperature.is_finite() {
        return Err(Error::Domain("sound temperature must be finite".into()));
    }
    frame.map(|v| ((v - sound_temperature) / expected_delta).clamp(0.0, 1.0))
}
