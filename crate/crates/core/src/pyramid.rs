//! Gaussian pyramid reduce / expand by powers of two.
//!
//! Both directions use the separable binomial taps `[1, 4, 6, 4, 1] / 16`
//! with replicated edges. `reduce` smooths then keeps samples `0, 2, 4, …`
//! (output side `ceil(n / 2)`); `expand` interpolates a zero-interleaved
//! upsampling with the same taps at double gain, extending the coarse grid
//! by replication so constants survive exactly at the borders.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::frame::ThermalFrame;

/// Binomial smoothing taps for offsets -2..=2.
pub const BINOMIAL_TAPS: [f64; 5] = [1.0 / 16.0, 4.0 / 16.0, 6.0 / 16.0, 4.0 / 16.0, 1.0 / 16.0];

/// One level of a pyramid: the frame at `1 / 2^level` resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct PyramidLevelFrame {
    pub level: usize,
    pub frame: ThermalFrame,
}

impl PyramidLevelFrame {
    pub fn scale_factor(&self) -> usize {
        1 << self.level
    }
}

#[inline]
fn clamp(i: isize, n: usize) -> usize {
    i.clamp(0, n as isize - 1) as usize
}

/// `ceil(n / 2)`.
#[inline]
pub fn half(n: usize) -> usize {
    n.div_ceil(2)
}

/// Dimensions at levels `0..=levels` under repeated ceil-halving.
pub fn dims_chain(width: usize, height: usize, levels: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(levels + 1);
    let mut d = (width, height);
    out.push(d);
    for _ in 0..levels {
        d = (half(d.0), half(d.1));
        out.push(d);
    }
    out
}

/// True when `reduce_n(frame, levels)` is valid for these dimensions.
pub fn can_reduce(width: usize, height: usize, levels: usize) -> bool {
    dims_chain(width, height, levels)
        .iter()
        .take(levels)
        .all(|&(w, h)| w >= 2 && h >= 2)
}

fn smooth_decimate_1d(src: &[f64], stride: usize, n: usize, out: &mut [f64], out_stride: usize) {
    for (o, i) in (0..half(n)).map(|o| (o, 2 * o as isize)) {
        let mut acc = 0.0;
        for (t, w) in BINOMIAL_TAPS.iter().enumerate() {
            acc += w * src[clamp(i + t as isize - 2, n) * stride];
        }
        out[o * out_stride] = acc;
    }
}

fn interpolate_1d(src: &[f64], stride: usize, n: usize, out: &mut [f64], out_stride: usize, target: usize) {
    for x in 0..target as isize {
        // taps landing on even (original) samples: x - 2m in -2..=2
        let mut acc = 0.0;
        let m_lo = (x - 2).div_euclid(2) + if (x - 2).rem_euclid(2) == 0 { 0 } else { 1 };
        let m_hi = (x + 2).div_euclid(2);
        for m in m_lo..=m_hi {
            let t = x - 2 * m;
            acc += 2.0 * BINOMIAL_TAPS[(t + 2) as usize] * src[clamp(m, n) * stride];
        }
        out[x as usize * out_stride] = acc;
    }
}

/// Smooths and halves a frame. Output dimensions are `ceil(dim / 2)`.
pub fn reduce(frame: &ThermalFrame) -> Result<ThermalFrame> {
    let (w, h) = frame.dims();
    if w < 2 || h < 2 {
        return Err(Error::CannotReduce { width: w, height: h });
    }
    let (w2, h2) = (half(w), half(h));
    let src = frame.data();
    // horizontal pass on every row
    let mut tmp = alloc::vec![0.0; w2 * h];
    for y in 0..h {
        smooth_decimate_1d(&src[y * w..], 1, w, &mut tmp[y * w2..], 1);
    }
    let mut out = alloc::vec![0.0; w2 * h2];
    for x in 0..w2 {
        smooth_decimate_1d(&tmp[x..], w2, h, &mut out[x..], w2);
    }
    Ok(ThermalFrame::from_raw(
        w2,
        h2,
        frame.pixel_pitch().map(|p| p * 2.0),
        out,
    ))
}

/// Doubles a frame to exactly `(target_width, target_height)`; each target
/// side must be `2n - 1` or `2n` for input side `n`.
pub fn expand(frame: &ThermalFrame, target_width: usize, target_height: usize) -> Result<ThermalFrame> {
    let (w, h) = frame.dims();
    let ok = |n: usize, t: usize| t == 2 * n || t + 1 == 2 * n;
    if !ok(w, target_width) || !ok(h, target_height) {
        return Err(Error::DimensionMismatch(format!(
            "cannot expand {w}x{h} to {target_width}x{target_height}; each side must become 2n-1 or 2n"
        )));
    }
    let src = frame.data();
    let mut tmp = alloc::vec![0.0; target_width * h];
    for y in 0..h {
        interpolate_1d(&src[y * w..], 1, w, &mut tmp[y * target_width..], 1, target_width);
    }
    let mut out = alloc::vec![0.0; target_width * target_height];
    for x in 0..target_width {
        interpolate_1d(&tmp[x..], target_width, h, &mut out[x..], target_width, target_height);
    }
    Ok(ThermalFrame::from_raw(
        target_width,
        target_height,
        frame.pixel_pitch().map(|p| p / 2.0),
        out,
    ))
}

/// `levels` successive reductions; `levels = 0` returns a copy.
pub fn reduce_n(frame: &ThermalFrame, levels: usize) -> Result<ThermalFrame> {
    let mut f = frame.clone();
    for _ in 0..levels {
        f = reduce(&f)?;
    }
    Ok(f)
}

/// Expands a level-`levels` frame back to the level-0 dimensions
/// `(width, height)`, retracing the ceil-halving chain exactly.
pub fn expand_n(frame: &ThermalFrame, levels: usize, width: usize, height: usize) -> Result<ThermalFrame> {
    let chain = dims_chain(width, height, levels);
    if frame.dims() != chain[levels] {
        return Err(Error::DimensionMismatch(format!(
            "level-{levels} frame of a {width}x{height} input must be {}x{}, got {}x{}",
            chain[levels].0,
            chain[levels].1,
            frame.width(),
            frame.height()
        )));
    }
    let mut f = frame.clone();
    for &(tw, th) in chain[..levels].iter().rev() {
        f = expand(&f, tw, th)?;
    }
    Ok(f)
}

/// Levels `0..=max_level` of a Gaussian pyramid.
pub fn build_pyramid(frame: &ThermalFrame, max_level: usize) -> Result<Vec<PyramidLevelFrame>> {
    let mut out = Vec::with_capacity(max_level + 1);
    out.push(PyramidLevelFrame {
        level: 0,
        frame: frame.clone(),
    });
    for level in 1..=max_level {
        let next = reduce(&out[level - 1].frame)?;
        out.push(PyramidLevelFrame { level, frame: next });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::frame_stats;

    #[test]
    fn taps_are_normalized() {
        assert_eq!(BINOMIAL_TAPS.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn reduce_constant_and_dims() {
        let f = ThermalFrame::filled(64, 64, 7.25).unwrap();
        let r = reduce(&f).unwrap();
        assert_eq!(r.dims(), (32, 32));
        assert!(r.data().iter().all(|&v| (v - 7.25).abs() < 1e-13));
        let f = ThermalFrame::filled(4, 4, 1.0).unwrap();
        assert_eq!(reduce(&f).unwrap().dims(), (2, 2));
        let f = ThermalFrame::filled(5, 3, 1.0).unwrap();
        assert_eq!(reduce(&f).unwrap().dims(), (3, 2));
    }

    #[test]
    fn reduce_needs_two_pixels() {
        let f = ThermalFrame::filled(1, 8, 1.0).unwrap();
        assert!(matches!(reduce(&f), Err(Error::CannotReduce { .. })));
    }

    #[test]
    fn expand_constant() {
        let f = ThermalFrame::filled(32, 32, -3.5).unwrap();
        for (tw, th) in [(64, 64), (63, 64), (63, 63)] {
            let e = expand(&f, tw, th).unwrap();
            assert_eq!(e.dims(), (tw, th));
            assert!(e.data().iter().all(|&v| (v + 3.5).abs() < 1e-13));
        }
    }

    #[test]
    fn expand_rejects_bad_targets() {
        let f = ThermalFrame::filled(2, 2, 1.0).unwrap();
        assert!(expand(&f, 5, 5).is_err());
        assert!(expand(&f, 2, 4).is_err());
        assert!(expand(&f, 3, 4).is_ok());
    }

    #[test]
    fn reduce_n_dims() {
        let f = ThermalFrame::filled(128, 96, 0.0).unwrap();
        assert_eq!(reduce_n(&f, 0).unwrap(), f);
        assert_eq!(reduce_n(&f, 4).unwrap().dims(), (8, 6));
        let chain: Vec<usize> = dims_chain(91, 91, 4).iter().map(|d| d.0).collect();
        assert_eq!(chain, [91, 46, 23, 12, 6]);
    }

    #[test]
    fn expand_n_retraces_odd_chain() {
        let f = ThermalFrame::from_fn(91, 37, |x, y| (x + y) as f64).unwrap();
        let r = reduce_n(&f, 3).unwrap();
        let e = expand_n(&r, 3, 91, 37).unwrap();
        assert_eq!(e.dims(), (91, 37));
        assert!(expand_n(&r, 2, 91, 37).is_err());
    }

    #[test]
    fn ramp_roundtrip() {
        // raised-cosine ramp: flat at both edges, rising 10 °C across the frame
        let ramp = |x: usize| 5.0 * (1.0 - libm::cos(core::f64::consts::PI * x as f64 / 63.0));
        let f = ThermalFrame::from_fn(64, 64, |x, y| ramp(x) + 0.5 * ramp(y)).unwrap();
        let back = expand(&reduce(&f).unwrap(), 64, 64).unwrap();
        let s = frame_stats(&f);
        let err = f
            .data()
            .iter()
            .zip(back.data())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 0.01 * (s.max - s.min), "max error {err}");
    }

    #[test]
    fn pitch_scales_with_level() {
        let f = ThermalFrame::filled(8, 8, 0.0)
            .unwrap()
            .with_pixel_pitch(Some(0.005))
            .unwrap();
        let p = build_pyramid(&f, 2).unwrap();
        assert_eq!(p[2].frame.pixel_pitch(), Some(0.02));
        assert_eq!(p[2].scale_factor(), 4);
    }
}
