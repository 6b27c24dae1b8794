//! Temperature grids and time-ordered stacks of them.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// One 2D grid of surface temperatures in °C, row-major.
///
/// Every value is finite; constructors reject NaN and infinities. The same
/// type carries filter responses, which are dimensionless.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalFrame {
    width: usize,
    height: usize,
    pixel_pitch: Option<f64>,
    data: Vec<f64>,
}

impl ThermalFrame {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidFrame(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        if data.len() != width * height {
            return Err(Error::InvalidFrame(format!(
                "expected {} values for {width}x{height}, got {}",
                width * height,
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidFrame(format!(
                "non-finite value at ({}, {})",
                i % width,
                i / width
            )));
        }
        Ok(Self {
            width,
            height,
            pixel_pitch: None,
            data,
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self> {
        Self::new(width, height, alloc::vec![value; width * height])
    }

    /// Builds a frame by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    /// Attaches a physical pixel size in meters.
    pub fn with_pixel_pitch(mut self, pitch: Option<f64>) -> Result<Self> {
        if let Some(p) = pitch {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::InvalidFrame(format!("pixel pitch must be positive, got {p}")));
            }
        }
        self.pixel_pitch = pitch;
        Ok(self)
    }

    /// Internal constructor for values produced by finite arithmetic on
    /// finite inputs; re-validated in debug builds.
    pub(crate) fn from_raw(width: usize, height: usize, pixel_pitch: Option<f64>, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height);
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self {
            width,
            height,
            pixel_pitch,
            data,
        }
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn pixel_pitch(&self) -> Option<f64> {
        self.pixel_pitch
    }

    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[f64] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn column(&self, x: usize) -> Vec<f64> {
        (0..self.height).map(|y| self.get(x, y)).collect()
    }

    /// Elementwise map. Fails if `f` produces a non-finite value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let data = self.data.iter().map(|&v| f(v)).collect();
        Ok(Self::new(self.width, self.height, data)?.with_pitch_unchecked(self.pixel_pitch))
    }

    /// Elementwise combination of two equally sized frames.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_dims(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self::new(self.width, self.height, data)?.with_pitch_unchecked(self.pixel_pitch))
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for x in 0..self.width {
            for y in 0..self.height {
                data.push(self.get(x, y));
            }
        }
        Self::from_raw(self.height, self.width, self.pixel_pitch, data)
    }

    pub fn check_same_dims(&self, other: &Self) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} vs {}x{}",
                self.width, self.height, other.width, other.height
            )));
        }
        Ok(())
    }

    pub(crate) fn with_pitch_unchecked(mut self, pitch: Option<f64>) -> Self {
        self.pixel_pitch = pitch;
        self
    }
}

/// Time-ordered stack of equally sized frames sampled every `dt` seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalSequence {
    frames: Vec<ThermalFrame>,
    dt: f64,
}

impl ThermalSequence {
    pub fn new(frames: Vec<ThermalFrame>, dt: f64) -> Result<Self> {
        let Some(first) = frames.first() else {
            return Err(Error::InvalidFrame("a sequence needs at least one frame".into()));
        };
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidFrame(format!("dt must be positive, got {dt}")));
        }
        for (i, f) in frames.iter().enumerate() {
            if f.dims() != first.dims() {
                return Err(Error::DimensionMismatch(format!(
                    "frame {i} is {}x{}, frame 0 is {}x{}",
                    f.width(),
                    f.height(),
                    first.width(),
                    first.height()
                )));
            }
        }
        Ok(Self { frames, dt })
    }

    pub fn frames(&self) -> &[ThermalFrame] {
        &self.frames
    }

    pub fn into_frames(self) -> Vec<ThermalFrame> {
        self.frames
    }

    pub fn frame(&self, index: usize) -> Option<&ThermalFrame> {
        self.frames.get(index)
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn dims(&self) -> (usize, usize) {
        self.frames[0].dims()
    }

    /// Temporal series of pixel `p` (row-major index).
    pub fn pixel_series(&self, p: usize) -> Vec<f64> {
        self.frames.iter().map(|f| f.data()[p]).collect()
    }
}

/// Binary per-pixel mask, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    pub width: usize,
    pub height: usize,
    pub data: Vec<bool>,
}

impl Mask {
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    /// Mean pixel position `(x, y)` of the set pixels.
    pub fn centroid(&self) -> Option<(f64, f64)> {
        let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    sx += x as f64;
                    sy += y as f64;
                    n += 1;
                }
            }
        }
        (n > 0).then(|| (sx / n as f64, sy / n as f64))
    }

    pub fn to_frame(&self) -> ThermalFrame {
        let data = self.data.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        ThermalFrame::from_raw(self.width, self.height, None, data)
    }
}

/// Descriptive statistics of one frame. `std` is the population standard
/// deviation (divides by N).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
}

/// Single-pass (Welford) min / max / mean / population std.
pub fn frame_stats(frame: &ThermalFrame) -> FrameStats {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &v) in frame.data().iter().enumerate() {
        min = min.min(v);
        max = max.max(v);
        let delta = v - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (v - mean);
    }
    let n = frame.len() as f64;
    FrameStats {
        min,
        max,
        mean,
        std: libm::sqrt((m2 / n).max(0.0)),
    }
}

/// Elementwise `a - b`.
pub fn subtract(a: &ThermalFrame, b: &ThermalFrame) -> Result<ThermalFrame> {
    a.zip_map(b, |x, y| x - y)
}
