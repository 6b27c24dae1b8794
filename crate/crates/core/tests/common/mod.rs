#![allow(dead_code)]

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thermolap_core::{Kernel, ThermalFrame};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in [0, 1).
pub fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

pub fn below(rng: &mut ChaCha8Rng, n: usize) -> usize {
    (unit(rng) * n as f64) as usize
}

/// Standard normal via Box-Muller.
pub fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = 1.0 - unit(rng);
    let u2 = unit(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn random_frame(rng: &mut ChaCha8Rng, w: usize, h: usize, lo: f64, hi: f64) -> ThermalFrame {
    let data = (0..w * h).map(|_| uniform(rng, lo, hi)).collect();
    ThermalFrame::new(w, h, data).unwrap()
}

pub fn random_kernel(rng: &mut ChaCha8Rng, size: usize) -> Kernel {
    Kernel::new(size, (0..size * size).map(|_| uniform(rng, -1.0, 1.0)).collect()).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Isotropic Gaussian bump of standard deviation `b` centred at `(cx, cy)`.
pub fn gaussian_blob(w: usize, h: usize, cx: f64, cy: f64, b: f64, amplitude: f64) -> ThermalFrame {
    ThermalFrame::from_fn(w, h, |x, y| {
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        amplitude * (-(dx * dx + dy * dy) / (2.0 * b * b)).exp()
    })
    .unwrap()
}
