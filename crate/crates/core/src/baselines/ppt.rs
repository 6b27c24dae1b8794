//! Pulse phase thermography: per-pixel temporal DFT of the mean-removed
//! temperature history, reported as phase and amplitude per frequency bin.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::fft::Fft;
use crate::error::{Error, Result};
use crate::frame::{ThermalFrame, ThermalSequence};
use crate::par;

/// Below this amplitude a bin's phase is reported as 0.
pub const PHASE_AMPLITUDE_FLOOR: f64 = 1e-12;

/// Phase and amplitude maps for bins `1..=N/2`.
///
/// Bin `k` is at `k / (N · dt)` Hz. The DC bin is not stored: every pixel
/// series is mean-centred before the transform.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseStack {
    width: usize,
    height: usize,
    frame_count: usize,
    dt: f64,
    /// Bin-major: `phase[(k - 1) * pixels + p]`, radians in (-π, π].
    phase: Vec<f64>,
    amplitude: Vec<f64>,
}

impl PhaseStack {
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn frame_count(&self) -> usize {
        self.frame_count
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Highest stored bin, `floor(N / 2)`.
    pub fn max_bin(&self) -> usize {
        self.frame_count / 2
    }

    pub fn bin_frequency(&self, k: usize) -> f64 {
        k as f64 / (self.frame_count as f64 * self.dt)
    }

    pub fn nyquist(&self) -> f64 {
        self.bin_frequency(self.max_bin())
    }

    fn slice<'a>(&self, data: &'a [f64], k: usize) -> Option<&'a [f64]> {
        if k == 0 || k > self.max_bin() {
            return None;
        }
        let p = self.width * self.height;
        Some(&data[(k - 1) * p..k * p])
    }

    /// Phase of pixel series at bin `k` (row-major pixels).
    pub fn phase_bin(&self, k: usize) -> Option<&[f64]> {
        self.slice(&self.phase, k)
    }

    pub fn amplitude_bin(&self, k: usize) -> Option<&[f64]> {
        self.slice(&self.amplitude, k)
    }

    pub fn phase_frame(&self, k: usize) -> Option<ThermalFrame> {
        self.phase_bin(k)
            .map(|d| ThermalFrame::from_raw(self.width, self.height, None, d.to_vec()))
    }

    pub fn amplitude_frame(&self, k: usize) -> Option<ThermalFrame> {
        self.amplitude_bin(k)
            .map(|d| ThermalFrame::from_raw(self.width, self.height, None, d.to_vec()))
    }

    /// Population variance of pixel `p`'s series recovered from its
    /// one-sided spectrum: `(2 Σ_{0<k<N/2} |X_k|² + |X_{N/2}|²) / N²`,
    /// with the Nyquist term counted once only for even `N`.
    pub fn spectral_variance(&self, p: usize) -> f64 {
        let n = self.frame_count;
        let pixels = self.width * self.height;
        let mut acc = 0.0;
        for k in 1..=self.max_bin() {
            let a = self.amplitude[(k - 1) * pixels + p];
            let weight = if n.is_multiple_of(2) && k == n / 2 { 1.0 } else { 2.0 };
            acc += weight * a * a;
        }
        acc / (n as f64 * n as f64)
    }
}

pub const MIN_FRAMES: usize = 4;

pub fn ppt_transform(seq: &ThermalSequence) -> Result<PhaseStack> {
    let n = seq.len();
    if n < MIN_FRAMES {
        return Err(Error::Domain(format!(
            "pulse phase needs at least {MIN_FRAMES} frames, got {n}"
        )));
    }
    let (width, height) = seq.dims();
    let pixels = width * height;
    let bins = n / 2;
    let fft = Fft::new(n);
    let frames = seq.frames();

    // pixel-major spectra, transposed to bin-major afterwards
    let spectra: Vec<Vec<(f64, f64)>> = par::map_indices(pixels, |p| {
        let mean = frames.iter().map(|f| f.data()[p]).sum::<f64>() / n as f64;
        let mut buf: Vec<Complex64> = frames.iter().map(|f| Complex64::new(f.data()[p] - mean, 0.0)).collect();
        fft.forward(&mut buf);
        buf[1..=bins]
            .iter()
            .map(|z| {
                let amp = z.norm();
                let phase = if amp < PHASE_AMPLITUDE_FLOOR {
                    0.0
                } else {
                    libm::atan2(z.im, z.re)
                };
                (phase, amp)
            })
            .collect()
    });

    let mut phase = alloc::vec![0.0; bins * pixels];
    let mut amplitude = alloc::vec![0.0; bins * pixels];
    for (p, s) in spectra.iter().enumerate() {
        for (k, &(ph, amp)) in s.iter().enumerate() {
            phase[k * pixels + p] = ph;
            amplitude[k * pixels + p] = amp;
        }
    }
    Ok(PhaseStack {
        width,
        height,
        frame_count: n,
        dt: seq.dt(),
        phase,
        amplitude,
    })
}

/// Phase map at the bin nearest `target_frequency` (Hz).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSelection {
    pub bin: usize,
    pub frequency: f64,
    pub phase: ThermalFrame,
}

/// Picks the nearest bin to `target_frequency`; exact midpoints go to the
/// lower bin. Targets closer to DC than to bin 1 select bin 1.
pub fn ppt_phase_at(stack: &PhaseStack, target_frequency: f64) -> Result<PhaseSelection> {
    let nyquist = stack.nyquist();
    if !(target_frequency > 0.0 && target_frequency <= nyquist) {
        return Err(Error::Domain(format!(
            "target frequency {target_frequency} Hz outside (0, {nyquist}] Hz"
        )));
    }
    let x = target_frequency * stack.frame_count as f64 * stack.dt;
    let lower = libm::floor(x);
    let mut bin = if x - lower > 0.5 {
        lower as usize + 1
    } else {
        lower as usize
    };
    bin = bin.clamp(1, stack.max_bin());
    Ok(PhaseSelection {
        bin,
        frequency: stack.bin_frequency(bin),
        phase: stack.phase_frame(bin).expect("bin within range"),
    })
}
