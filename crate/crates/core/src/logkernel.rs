//! Symmetric and generalized Laplacian-of-Gaussian kernels.
//!
//! The generalized kernel is parameterized by two scales `(sigma_x, sigma_y)`
//! and an orientation `theta`. With
//!
//! ```text
//! a = cos²θ/(2σx²) + sin²θ/(2σy²)
//! b = -sin2θ/(4σx²) + sin2θ/(4σy²)
//! c = sin²θ/(2σx²) + cos²θ/(2σy²)
//! ```
//!
//! the Laplacian is the sum of the two second partials
//!
//! ```text
//! ∂²G/∂x² = A[(2ax + 2by)² - 2a] · exp(-(ax² + 2bxy + cy²))
//! ∂²G/∂y² = A[(2bx + 2cy)² - 2c] · exp(-(ax² + 2bxy + cy²))
//! ```
//!
//! scaled by `A = (1 + ln(σx)^α)(1 + ln(σy)^α)`.
//!
//! Built kernels are negated, so a hot blob on a cooler background yields a
//! positive response, and mean-corrected so they sum to zero.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::convolve::Kernel;
use crate::error::{Error, Result};

/// Largest kernel side length [`build_log_kernel`] will produce.
pub const MAX_KERNEL_SIZE: usize = 513;

/// Parameters of a (generalized) LoG kernel, in pixels and radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoGParams {
    sigma_x: f64,
    sigma_y: f64,
    theta: f64,
    alpha: f64,
    truncation: f64,
}

impl LoGParams {
    pub const DEFAULT_ALPHA: f64 = 1.0;
    pub const DEFAULT_TRUNCATION: f64 = 4.0;

    /// `theta` is reduced modulo π; the kernel is π-periodic in orientation.
    pub fn new(sigma_x: f64, sigma_y: f64, theta: f64, alpha: f64) -> Result<Self> {
        Self::with_truncation(sigma_x, sigma_y, theta, alpha, Self::DEFAULT_TRUNCATION)
    }

    pub fn with_truncation(sigma_x: f64, sigma_y: f64, theta: f64, alpha: f64, truncation: f64) -> Result<Self> {
        for (name, v) in [
            ("sigma_x", sigma_x),
            ("sigma_y", sigma_y),
            ("alpha", alpha),
            ("truncation", truncation),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !theta.is_finite() {
            return Err(Error::Config(format!("theta must be finite, got {theta}")));
        }
        let mut theta = theta - libm::floor(theta / PI) * PI;
        if !(0.0..PI).contains(&theta) {
            theta = 0.0;
        }
        Ok(Self {
            sigma_x,
            sigma_y,
            theta,
            alpha,
            truncation,
        })
    }

    /// Isotropic kernel with the default α and truncation.
    pub fn symmetric(sigma: f64) -> Result<Self> {
        Self::new(sigma, sigma, 0.0, Self::DEFAULT_ALPHA)
    }

    pub fn sigma_x(&self) -> f64 {
        self.sigma_x
    }

    pub fn sigma_y(&self) -> f64 {
        self.sigma_y
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    pub fn is_symmetric(&self) -> bool {
        self.sigma_x == self.sigma_y
    }

    /// Half-width of the sampled kernel: `ceil(truncation · max σ)`.
    pub fn radius(&self) -> usize {
        libm::ceil(self.truncation * self.sigma_x.max(self.sigma_y)) as usize
    }
}

impl Default for LoGParams {
    fn default() -> Self {
        Self {
            sigma_x: 2.0,
            sigma_y: 2.0,
            theta: 0.0,
            alpha: Self::DEFAULT_ALPHA,
            truncation: Self::DEFAULT_TRUNCATION,
        }
    }
}

/// Quadratic-form coefficients controlling shape and orientation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

pub fn shape_coefficients(params: &LoGParams) -> ShapeCoefficients {
    let (s, c) = libm::sincos(params.theta);
    let s2 = libm::sin(2.0 * params.theta);
    let vx = params.sigma_x * params.sigma_x;
    let vy = params.sigma_y * params.sigma_y;
    ShapeCoefficients {
        a: c * c / (2.0 * vx) + s * s / (2.0 * vy),
        b: -s2 / (4.0 * vx) + s2 / (4.0 * vy),
        c: s * s / (2.0 * vx) + c * c / (2.0 * vy),
    }
}

/// Eccentricity normalization `A = (1 + ln(σx)^α)(1 + ln(σy)^α)`.
///
/// Only defined in the reals for σ ≥ 1 (ln σ < 0 raised to a fractional α
/// is complex).
pub fn normalization_factor(params: &LoGParams) -> Result<f64> {
    if params.sigma_x < 1.0 || params.sigma_y < 1.0 {
        return Err(Error::Domain(format!(
            "normalization needs sigma >= 1 (got sigma_x={}, sigma_y={}); use sigma >= 1 for generalized kernels",
            params.sigma_x, params.sigma_y
        )));
    }
    let term = |s: f64| 1.0 + libm::pow(libm::log(s), params.alpha);
    Ok(term(params.sigma_x) * term(params.sigma_y))
}

/// Samples the negated, mean-corrected LoG at integer offsets.
pub fn build_log_kernel(params: &LoGParams) -> Result<Kernel> {
    let radius = params.radius();
    let size = 2 * radius + 1;
    if size > MAX_KERNEL_SIZE {
        return Err(Error::Config(format!(
            "kernel side {size} exceeds {MAX_KERNEL_SIZE}; reduce sigma or truncation"
        )));
    }
    let scale = match normalization_factor(params) {
        Ok(a) => a,
        // a global scale; isotropic kernels below σ = 1 skip it
        Err(_) if params.is_symmetric() => 1.0,
        Err(e) => return Err(e),
    };
    let ShapeCoefficients { a, b, c } = shape_coefficients(params);
    let r = radius as isize;
    let mut weights = Vec::with_capacity(size * size);
    for dy in -r..=r {
        for dx in -r..=r {
            let (x, y) = (dx as f64, dy as f64);
            let envelope = libm::exp(-(a * x * x + 2.0 * b * x * y + c * y * y));
            let gx = 2.0 * a * x + 2.0 * b * y;
            let gy = 2.0 * b * x + 2.0 * c * y;
            let lap = scale * ((gx * gx - 2.0 * a) + (gy * gy - 2.0 * c)) * envelope;
            weights.push(-lap);
        }
    }
    let mean = weights.iter().sum::<f64>() / weights.len() as f64;
    for w in &mut weights {
        *w -= mean;
    }
    Ok(Kernel::from_raw(size, weights))
}

/// Scale matched to a blob of radius `s` pixels: `σ = (s - 1) / 3`.
pub fn sigma_from_radius(s: f64) -> Result<f64> {
    if !(s.is_finite() && s > 1.0) {
        return Err(Error::Domain(format!("blob radius must exceed 1 pixel, got {s}")));
    }
    Ok((s - 1.0) / 3.0)
}

/// Blob radius matched by scale `sigma`; inverse of [`sigma_from_radius`].
pub fn radius_from_sigma(sigma: f64) -> f64 {
    3.0 * sigma + 1.0
}
