//! "Same"-size 2D convolution with explicit border handling.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::frame::ThermalFrame;
use crate::par;

/// How samples outside the frame are synthesized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BorderPolicy {
    /// Repeat the nearest edge pixel.
    #[default]
    Replicate,
    /// Mirror about the edge pixel without repeating it (`-1 -> 1`).
    Reflect,
    /// Treat everything outside the frame as 0.
    Zero,
}

impl BorderPolicy {
    /// Maps a possibly out-of-range coordinate onto `0..n`, or `None` for a
    /// zero-padded sample.
    #[inline]
    pub fn resolve(self, i: isize, n: usize) -> Option<usize> {
        let last = n as isize - 1;
        if (0..=last).contains(&i) {
            return Some(i as usize);
        }
        match self {
            BorderPolicy::Replicate => Some(i.clamp(0, last) as usize),
            BorderPolicy::Zero => None,
            BorderPolicy::Reflect => {
                if n == 1 {
                    return Some(0);
                }
                // reflect-101 is periodic with period 2(n-1)
                let period = 2 * last;
                let mut r = i.rem_euclid(period);
                if r > last {
                    r = period - r;
                }
                Some(r as usize)
            }
        }
    }
}

/// Square filter with odd side length; the anchor is the center sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    size: usize,
    weights: Vec<f64>,
}

impl Kernel {
    pub fn new(size: usize, weights: Vec<f64>) -> Result<Self> {
        if size.is_multiple_of(2) {
            return Err(Error::InvalidKernel(format!("side length must be odd, got {size}")));
        }
        if weights.len() != size * size {
            return Err(Error::InvalidKernel(format!(
                "expected {} weights for side {size}, got {}",
                size * size,
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidKernel("weights must be finite".into()));
        }
        Ok(Self { size, weights })
    }

    pub fn identity() -> Self {
        Self {
            size: 1,
            weights: alloc::vec![1.0],
        }
    }

    /// Evaluates `f(dx, dy)` at every offset from the anchor.
    pub fn from_offsets(radius: usize, mut f: impl FnMut(isize, isize) -> f64) -> Result<Self> {
        let r = radius as isize;
        let size = 2 * radius + 1;
        let mut weights = Vec::with_capacity(size * size);
        for dy in -r..=r {
            for dx in -r..=r {
                weights.push(f(dx, dy));
            }
        }
        Self::new(size, weights)
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn radius(&self) -> usize {
        self.size / 2
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight at offset `(dx, dy)` from the anchor.
    #[inline]
    pub fn at(&self, dx: isize, dy: isize) -> f64 {
        let r = self.radius() as isize;
        self.weights[((dy + r) as usize) * self.size + (dx + r) as usize]
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn transpose(&self) -> Self {
        let n = self.size;
        let weights = (0..n * n).map(|i| self.weights[(i % n) * n + i / n]).collect();
        Self { size: n, weights }
    }

    pub(crate) fn from_raw(size: usize, weights: Vec<f64>) -> Self {
        debug_assert!(size % 2 == 1 && weights.len() == size * size);
        Self { size, weights }
    }
}

/// Convolves `frame` with `kernel`, returning a frame of the same size.
///
/// `out(x, y) = Σ k(dx, dy) · f(x - dx, y - dy)` with out-of-range samples
/// supplied by `border`. The sum runs over kernel rows, then columns, in a
/// fixed order, so the result does not depend on the thread count.
pub fn convolve(frame: &ThermalFrame, kernel: &Kernel, border: BorderPolicy) -> Result<ThermalFrame> {
    if kernel.size().is_multiple_of(2) {
        return Err(Error::InvalidKernel(format!(
            "side length must be odd, got {}",
            kernel.size()
        )));
    }
    if frame.data().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidFrame("non-finite input".into()));
    }
    let (w, h) = frame.dims();
    let r = kernel.radius() as isize;
    let src = frame.data();
    let mut out = alloc::vec![0.0; w * h];

    // Border lookups are precomputed per axis: column index for each
    // (x, dx) and row index for each (y, dy).
    let col_map: Vec<Option<usize>> = (0..w as isize)
        .flat_map(|x| (-r..=r).map(move |dx| border.resolve(x - dx, w)))
        .collect();
    let span = kernel.size();

    par::for_each_chunk(&mut out, w, |y, row| {
        let y = y as isize;
        for (x, o) in row.iter_mut().enumerate() {
            let cols = &col_map[x * span..(x + 1) * span];
            let mut acc = 0.0;
            for dy in -r..=r {
                let Some(sy) = border.resolve(y - dy, h) else {
                    continue;
                };
                let src_row = &src[sy * w..(sy + 1) * w];
                let krow = &kernel.weights[((dy + r) as usize) * span..((dy + r) as usize + 1) * span];
                for (kw, c) in krow.iter().zip(cols) {
                    if let Some(sx) = c {
                        acc += kw * src_row[*sx];
                    }
                }
            }
            *o = acc;
        }
    });
    Ok(ThermalFrame::from_raw(w, h, frame.pixel_pitch(), out))
}
