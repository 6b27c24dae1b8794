//! `THERMOSEQ/1`: a text header followed by raw little-endian `f64` samples.
//!
//! ```text
//! THERMOSEQ/1
//! width 64
//! height 48
//! frame_count 10
//! dt_seconds 5
//! pixel_pitch 0.005
//! units degC
//!
//! <width * height * frame_count * 8 bytes, frame-major then row-major>
//! ```
//!
//! Header fields appear in exactly this order. `pixel_pitch` is `none` when
//! unknown. Numbers use the shortest representation that reads back to the
//! same `f64`.

use std::path::Path;

use thermolap_core::{ThermalFrame, ThermalSequence};

use crate::error::{CliError, Result};
use crate::fsio;

pub const MAGIC: &str = "THERMOSEQ/1";

const FIELDS: [&str; 6] = ["width", "height", "frame_count", "dt_seconds", "pixel_pitch", "units"];

/// A decoded sequence file.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceFile {
    pub sequence: ThermalSequence,
    /// Free-form unit tag, e.g. `degC`, `response`, `rad`.
    pub units: String,
}

fn bad(msg: impl Into<String>) -> CliError {
    CliError::Format(msg.into())
}

pub fn encode(sequence: &ThermalSequence, units: &str) -> Result<Vec<u8>> {
    if units.is_empty() || units.chars().any(|c| c.is_whitespace() || c.is_control()) {
        return Err(CliError::Usage(format!(
            "units tag {units:?} must be one non-empty word"
        )));
    }
    let (w, h) = sequence.dims();
    let pitch = match sequence.frames()[0].pixel_pitch() {
        Some(p) => p.to_string(),
        None => "none".to_string(),
    };
    let header = format!(
        "{MAGIC}\nwidth {w}\nheight {h}\nframe_count {}\ndt_seconds {}\npixel_pitch {pitch}\nunits {units}\n\n",
        sequence.len(),
        sequence.dt()
    );
    let mut out = Vec::with_capacity(header.len() + w * h * sequence.len() * 8);
    out.extend_from_slice(header.as_bytes());
    for frame in sequence.frames() {
        for v in frame.data() {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(out)
}

/// True when `bytes` starts with the magic line.
pub fn sniff(bytes: &[u8]) -> bool {
    bytes.starts_with(MAGIC.as_bytes()) && matches!(bytes.get(MAGIC.len()), Some(b'\n') | Some(b'\r'))
}

pub fn decode(bytes: &[u8]) -> Result<SequenceFile> {
    let mut rest = bytes;
    let mut next_line = || -> Result<&str> {
        let end = rest
            .iter()
            .position(|&b| b == b'\n')
            .ok_or_else(|| bad("truncated header"))?;
        let line = std::str::from_utf8(&rest[..end]).map_err(|_| bad("header is not UTF-8"))?;
        rest = &rest[end + 1..];
        Ok(line.strip_suffix('\r').unwrap_or(line))
    };
    if next_line()? != MAGIC {
        return Err(bad(format!("missing {MAGIC} magic line")));
    }
    let mut values = Vec::with_capacity(FIELDS.len());
    for key in FIELDS {
        let line = next_line()?;
        let (k, v) = line
            .split_once(' ')
            .ok_or_else(|| bad(format!("malformed header line {line:?}")))?;
        if k != key {
            return Err(bad(format!("expected header field {key:?}, found {k:?}")));
        }
        values.push(v.trim().to_string());
    }
    if !next_line()?.is_empty() {
        return Err(bad("header must end with a blank line"));
    }

    let count = |i: usize| -> Result<usize> {
        values[i]
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| bad(format!("{} must be a positive integer, got {:?}", FIELDS[i], values[i])))
    };
    let (w, h, n) = (count(0)?, count(1)?, count(2)?);
    let dt: f64 = values[3]
        .parse()
        .map_err(|_| bad(format!("dt_seconds is not a number: {:?}", values[3])))?;
    let pitch = match values[4].as_str() {
        "none" => None,
        s => Some(
            s.parse::<f64>()
                .map_err(|_| bad(format!("pixel_pitch is not a number: {s:?}")))?,
        ),
    };
    let units = values[5].clone();
    if units.is_empty() {
        return Err(bad("units must not be empty"));
    }

    let expected = w
        .checked_mul(h)
        .and_then(|p| p.checked_mul(n))
        .and_then(|p| p.checked_mul(8))
        .ok_or_else(|| bad("dimensions overflow"))?;
    if rest.len() != expected {
        return Err(bad(format!(
            "payload holds {} bytes, header implies {expected}",
            rest.len()
        )));
    }
    let mut frames = Vec::with_capacity(n);
    for chunk in rest.chunks_exact(w * h * 8) {
        let data = chunk
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
            .collect();
        let frame = ThermalFrame::new(w, h, data)
            .and_then(|f| f.with_pixel_pitch(pitch))
            .map_err(|e| bad(e.to_string()))?;
        frames.push(frame);
    }
    let sequence = ThermalSequence::new(frames, dt).map_err(|e| bad(e.to_string()))?;
    Ok(SequenceFile { sequence, units })
}

pub fn read(path: &Path) -> Result<SequenceFile> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    decode(&bytes).map_err(|e| match e {
        CliError::Format(m) => CliError::Format(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn write(path: &Path, sequence: &ThermalSequence, units: &str) -> Result<()> {
    fsio::write_atomic(path, &encode(sequence, units)?)
}
