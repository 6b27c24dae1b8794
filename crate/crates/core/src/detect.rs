//! Multi-scale blob detection: for each configured pyramid level, reduce the
//! frame, filter it with one fixed LoG kernel, expand the response back to
//! full resolution, then sum the levels and optionally rectify.
//!
//! A fixed kernel on a frame reduced `i` times responds to blobs `2^i`
//! times larger than on the raw frame, so summing levels integrates targets
//! of several sizes into a single map.

use alloc::format;
use alloc::vec::Vec;

use crate::convolve::{convolve, BorderPolicy, Kernel};
use crate::error::{Error, Result};
use crate::frame::ThermalFrame;
use crate::logkernel::{build_log_kernel, LoGParams};
use crate::par;
use crate::pyramid::{can_reduce, expand_n, reduce_n};

/// Deepest pyramid level a configuration may request.
pub const MAX_LEVEL: usize = 8;

/// R² above which a level's response is considered dominated by a global
/// quadratic trend.
pub const TREND_FLAG_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectConfig {
    pub log_params: LoGParams,
    /// Pyramid levels to sum, strictly increasing.
    pub levels: Vec<usize>,
    pub rectify: bool,
    pub border: BorderPolicy,
}

impl Default for DetectConfig {
    /// σ = 2 px, levels 1 through 4, rectified, replicated borders.
    fn default() -> Self {
        Self {
            log_params: LoGParams::default(),
            levels: alloc::vec![1, 2, 3, 4],
            rectify: true,
            border: BorderPolicy::Replicate,
        }
    }
}

impl DetectConfig {
    pub fn validate(&self) -> Result<()> {
        if self.levels.is_empty() {
            return Err(Error::Config("at least one level is required".into()));
        }
        if self.levels.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "levels must be strictly increasing: {:?}",
                self.levels
            )));
        }
        if let Some(&max) = self.levels.last() {
            if max > MAX_LEVEL {
                return Err(Error::Config(format!("level {max} exceeds the maximum of {MAX_LEVEL}")));
            }
        }
        Ok(())
    }
}

/// Frame-shaped filter response with the levels that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionMap {
    pub map: ThermalFrame,
    pub levels: Vec<usize>,
    pub rectified: bool,
}

impl DetectionMap {
    pub fn data(&self) -> &[f64] {
        self.map.data()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.map.dims()
    }
}

fn check_level(frame: &ThermalFrame, level: usize) -> Result<()> {
    let (w, h) = frame.dims();
    if !can_reduce(w, h, level) {
        return Err(Error::Config(format!(
            "a {w}x{h} frame is too small for pyramid level {level}"
        )));
    }
    Ok(())
}

fn single_level_with(
    frame: &ThermalFrame,
    kernel: &Kernel,
    border: BorderPolicy,
    level: usize,
) -> Result<ThermalFrame> {
    check_level(frame, level)?;
    let reduced = reduce_n(frame, level)?;
    let response = convolve(&reduced, kernel, border)?;
    let (w, h) = frame.dims();
    let out = expand_n(&response, level, w, h)?;
    Ok(out.with_pitch_unchecked(frame.pixel_pitch()))
}

/// Unrectified response of pyramid level `level`, at full resolution.
pub fn detect_single_level(frame: &ThermalFrame, config: &DetectConfig, level: usize) -> Result<DetectionMap> {
    let kernel = build_log_kernel(&config.log_params)?;
    let map = single_level_with(frame, &kernel, config.border, level)?;
    Ok(DetectionMap {
        map,
        levels: alloc::vec![level],
        rectified: false,
    })
}

/// Sum of the configured levels' responses, rectified when
/// `config.rectify` is set. Levels are summed in ascending order.
pub fn detect_multiscale(frame: &ThermalFrame, config: &DetectConfig) -> Result<DetectionMap> {
    config.validate()?;
    for &level in &config.levels {
        check_level(frame, level)?;
    }
    let kernel = build_log_kernel(&config.log_params)?;
    let maps = par::map_indices(config.levels.len(), |i| {
        single_level_with(frame, &kernel, config.border, config.levels[i])
    });
    let mut sum = alloc::vec![0.0; frame.len()];
    for m in maps {
        for (s, v) in sum.iter_mut().zip(m?.data()) {
            *s += v;
        }
    }
    let (w, h) = frame.dims();
    let summed = DetectionMap {
        map: ThermalFrame::from_raw(w, h, frame.pixel_pitch(), sum),
        levels: config.levels.clone(),
        rectified: false,
    };
    Ok(if config.rectify { rectify(&summed) } else { summed })
}

/// Elementwise `max(0, x)`. Idempotent.
pub fn rectify(map: &DetectionMap) -> DetectionMap {
    let (w, h) = map.dims();
    let data = map.data().iter().map(|&v| if v > 0.0 { v } else { 0.0 }).collect();
    DetectionMap {
        map: ThermalFrame::from_raw(w, h, map.map.pixel_pitch(), data),
        levels: map.levels.clone(),
        rectified: true,
    }
}

/// Per-level entry of a [`LevelDiagnostic`].
#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub level: usize,
    /// Share of the summed rectified response over levels `0..=i_max`.
    pub energy_fraction: f64,
    /// Fraction of the unrectified map's variance explained by a
    /// least-squares quadratic surface in `(x, y)`.
    pub trend_r2: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelDiagnostic {
    pub levels: Vec<LevelReport>,
}

impl LevelDiagnostic {
    /// First flagged level: summation should stop before it.
    pub fn stop_before(&self) -> Option<usize> {
        self.levels.iter().find(|r| r.flagged).map(|r| r.level)
    }
}

/// Advisory report on which levels respond to a global heating pattern
/// rather than local blobs. Nothing is truncated automatically.
///
/// The trend score is an ordinary R², so a level whose reduced frame has
/// only a handful of samples per side (e.g. level 4 of a 64-pixel frame)
/// can score high on noise alone.
pub fn level_diagnostic(frame: &ThermalFrame, config: &DetectConfig, i_max: usize) -> Result<LevelDiagnostic> {
    check_level(frame, i_max)?;
    let kernel = build_log_kernel(&config.log_params)?;
    let maps = par::map_indices(i_max + 1, |level| {
        single_level_with(frame, &kernel, config.border, level)
    });
    let mut energies = Vec::with_capacity(i_max + 1);
    let mut r2s = Vec::with_capacity(i_max + 1);
    for m in maps {
        let m = m?;
        energies.push(m.data().iter().map(|&v| v.max(0.0)).sum::<f64>());
        r2s.push(quadratic_trend_r2(&m));
    }
    let total: f64 = energies.iter().sum();
    let levels = energies
        .iter()
        .zip(&r2s)
        .enumerate()
        .map(|(level, (&e, &r2))| LevelReport {
            level,
            energy_fraction: if total > 0.0 { e / total } else { 0.0 },
            trend_r2: r2,
            flagged: r2 > TREND_FLAG_THRESHOLD,
        })
        .collect();
    Ok(LevelDiagnostic { levels })
}

/// R² of the least-squares fit `c0 + c1 x + c2 y + c3 x² + c4 xy + c5 y²`,
/// coordinates scaled to [-1, 1]. Maps with negligible variance score 0.
pub fn quadratic_trend_r2(frame: &ThermalFrame) -> f64 {
    let (w, h) = frame.dims();
    let n = frame.len() as f64;
    let mean = frame.data().iter().sum::<f64>() / n;
    let ss_tot: f64 = frame.data().iter().map(|v| (v - mean) * (v - mean)).sum();
    let scale = frame.data().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if ss_tot <= n * (1e-12 * scale) * (1e-12 * scale) || ss_tot == 0.0 {
        return 0.0;
    }
    let coord = |i: usize, n: usize| {
        if n > 1 {
            2.0 * i as f64 / (n - 1) as f64 - 1.0
        } else {
            0.0
        }
    };
    let xs: Vec<f64> = (0..frame.len()).map(|i| coord(i % w, w)).collect();
    let ys: Vec<f64> = (0..frame.len()).map(|i| coord(i / w, h)).collect();
    let columns: [&dyn Fn(usize) -> f64; 6] = [
        &|_| 1.0,
        &|i| xs[i],
        &|i| ys[i],
        &|i| xs[i] * xs[i],
        &|i| xs[i] * ys[i],
        &|i| ys[i] * ys[i],
    ];
    // orthonormal basis of the quadratic surfaces by modified Gram-Schmidt;
    // columns that collapse (1- or 2-pixel sides) are dropped
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(6);
    for col in columns {
        let mut c: Vec<f64> = (0..frame.len()).map(col).collect();
        let norm0 = libm::sqrt(c.iter().map(|v| v * v).sum::<f64>());
        for _ in 0..2 {
            for q in &basis {
                let d: f64 = q.iter().zip(&c).map(|(a, b)| a * b).sum();
                c.iter_mut().zip(q).for_each(|(v, qv)| *v -= d * qv);
            }
        }
        let norm = libm::sqrt(c.iter().map(|v| v * v).sum::<f64>());
        if norm > 1e-9 * norm0 {
            c.iter_mut().for_each(|v| *v /= norm);
            basis.push(c);
        }
    }
    let ss_fit: f64 = basis
        .iter()
        .map(|q| {
            let d: f64 = q.iter().zip(frame.data()).map(|(a, v)| a * (v - mean)).sum();
            d * d
        })
        .sum();
    (ss_fit / ss_tot).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        let mut c = DetectConfig::default();
        assert!(c.validate().is_ok());
        c.levels = alloc::vec![];
        assert!(c.validate().is_err());
        c.levels = alloc::vec![2, 1];
        assert!(c.validate().is_err());
        c.levels = alloc::vec![1, 1];
        assert!(c.validate().is_err());
        c.levels = alloc::vec![0, 9];
        assert!(c.validate().is_err());
    }

    #[test]
    fn rectify_definition() {
        let f = ThermalFrame::new(3, 1, alloc::vec![-3.0, 0.0, 2.5]).unwrap();
        let m = DetectionMap {
            map: f,
            levels: alloc::vec![0],
            rectified: false,
        };
        let r = rectify(&m);
        assert_eq!(r.data(), &[0.0, 0.0, 2.5]);
        assert!(r.rectified);
        assert_eq!(rectify(&r), r);
    }

    #[test]
    fn level_zero_is_plain_convolution() {
        let f = ThermalFrame::from_fn(24, 20, |x, y| ((x * 13 + y * 7) % 11) as f64).unwrap();
        let c = DetectConfig::default();
        let single = detect_single_level(&f, &c, 0).unwrap();
        let k = build_log_kernel(&c.log_params).unwrap();
        assert_eq!(single.map, convolve(&f, &k, c.border).unwrap());
        let cfg = DetectConfig {
            levels: alloc::vec![0],
            rectify: false,
            ..c
        };
        assert_eq!(detect_multiscale(&f, &cfg).unwrap().map, single.map);
    }

    #[test]
    fn constant_frame_gives_zero_map() {
        let f = ThermalFrame::filled(40, 33, 21.0).unwrap();
        for level in 0..=3 {
            let m = detect_single_level(&f, &DetectConfig::default(), level).unwrap();
            assert!(m.data().iter().all(|v| v.abs() < 1e-12));
        }
        let m = detect_multiscale(&f, &DetectConfig::default()).unwrap();
        assert!(m.data().iter().all(|&v| v == 0.0 || v.abs() < 1e-12));
    }

    #[test]
    fn too_deep_level_rejected() {
        let f = ThermalFrame::filled(8, 8, 0.0).unwrap();
        assert!(detect_single_level(&f, &DetectConfig::default(), 3).is_ok());
        assert!(detect_single_level(&f, &DetectConfig::default(), 4).is_err());
    }

    #[test]
    fn trend_r2_of_exact_quadratic() {
        let f = ThermalFrame::from_fn(30, 20, |x, y| {
            let (x, y) = (x as f64, y as f64);
            1.0 + 0.2 * x - 0.1 * y + 0.03 * x * x - 0.01 * x * y
        })
        .unwrap();
        assert!(quadratic_trend_r2(&f) > 1.0 - 1e-9);
        let flat = ThermalFrame::filled(5, 5, 2.0).unwrap();
        assert_eq!(quadratic_trend_r2(&flat), 0.0);
    }
}
