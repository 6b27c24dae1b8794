//! Principal component thermography: SVD of the temporally mean-centred
//! `time × pixel` data matrix.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use super::svd::thin_svd;
use crate::error::{Error, Result};
use crate::frame::{ThermalFrame, ThermalSequence};

/// Spatial principal components ordered by descending singular value.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentStack {
    pub width: usize,
    pub height: usize,
    pub frame_count: usize,
    /// All `min(N, P)` singular values, non-increasing.
    pub singular_values: Vec<f64>,
    /// Unit-norm spatial singular vectors reshaped to frames; the pixel of
    /// largest magnitude in each is positive.
    pub components: Vec<ThermalFrame>,
    /// Matching unit-norm temporal singular vectors (length N).
    pub temporal: Vec<Vec<f64>>,
    /// Squared Frobenius norm of the centred data.
    pub total_variance: f64,
}

impl ComponentStack {
    /// Share of the total variance carried by component `i`.
    pub fn variance_share(&self, i: usize) -> f64 {
        if self.total_variance == 0.0 {
            return 0.0;
        }
        let s = self.singular_values[i];
        s * s / self.total_variance
    }

    /// True when the sequence had no temporal variation at all.
    pub fn is_degenerate(&self) -> bool {
        self.singular_values.iter().all(|&s| s == 0.0)
    }

    /// Rebuilds the centred data (frame-major) from the stored components.
    pub fn reconstruct(&self) -> Vec<ThermalFrame> {
        let p = self.width * self.height;
        (0..self.frame_count)
            .map(|t| {
                let mut data = alloc::vec![0.0; p];
                for (i, comp) in self.components.iter().enumerate() {
                    let w = self.singular_values[i] * self.temporal[i][t];
                    for (d, &c) in data.iter_mut().zip(comp.data()) {
                        *d += w * c;
                    }
                }
                ThermalFrame::from_raw(self.width, self.height, None, data)
            })
            .collect()
    }
}

/// Decomposes `seq` and keeps the leading `n_components` spatial components.
///
/// A sequence without temporal variation yields all-zero singular values; it
/// is reported through [`ComponentStack::is_degenerate`], not as an error.
pub fn pct_transform(seq: &ThermalSequence, n_components: usize) -> Result<ComponentStack> {
    let n = seq.len();
    let (width, height) = seq.dims();
    let p = width * height;
    if n < 2 {
        return Err(Error::Domain(format!(
            "principal components need at least 2 frames, got {n}"
        )));
    }
    let rank = n.min(p);
    if n_components == 0 || n_components > rank {
        return Err(Error::Domain(format!(
            "n_components must be in 1..={rank} for {n} frames of {p} pixels, got {n_components}"
        )));
    }

    let frames = seq.frames();
    let mut x = DMatrix::<f64>::zeros(n, p);
    for j in 0..p {
        let mean = frames.iter().map(|f| f.data()[j]).sum::<f64>() / n as f64;
        for (t, f) in frames.iter().enumerate() {
            x[(t, j)] = f.data()[j] - mean;
        }
    }
    let total_variance = x.iter().map(|v| v * v).sum::<f64>();

    // factor the tall orientation so the spatial vectors are always complete
    let (spatial_of, temporal_of, singular_values) = if p >= n {
        let t = thin_svd(x.transpose());
        (t.left, t.right, t.values)
    } else {
        let t = thin_svd(x);
        (t.right, t.left, t.values)
    };

    let mut components = Vec::with_capacity(n_components);
    let mut temporal = Vec::with_capacity(n_components);
    for i in 0..n_components {
        let mut spatial: Vec<f64> = spatial_of.column(i).iter().copied().collect();
        let mut series: Vec<f64> = temporal_of.column(i).iter().copied().collect();
        let mut peak = 0.0f64;
        for &v in &spatial {
            if v.abs() > peak.abs() {
                peak = v;
            }
        }
        if peak < 0.0 {
            spatial.iter_mut().for_each(|v| *v = -*v);
            series.iter_mut().for_each(|v| *v = -*v);
        }
        components.push(ThermalFrame::from_raw(width, height, frames[0].pixel_pitch(), spatial));
        temporal.push(series);
    }

    Ok(ComponentStack {
        width,
        height,
        frame_count: n,
        singular_values,
        components,
        temporal,
        total_variance,
    })
}
