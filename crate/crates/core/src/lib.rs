#![cfg_attr(not(feature = "std"), no_std)]
//! Multi-scale Laplacian-of-Gaussian filtering for thermographic blob detection.
//!
//! The crate is `no_std` + `alloc`. Everything here is a pure function of its
//! inputs; file formats and the command-line front end live in the
//! `thermolap` crate.
//!
//! # Modules
//!
//! - [`frame`] – temperature grids, sequences and descriptive statistics.
//! - [`convolve`] – "same"-size 2D convolution with explicit border handling.
//! - [`logkernel`] – symmetric and generalized (anisotropic, oriented) LoG kernels.
//! - [`pyramid`] – Gaussian pyramid reduce / expand by powers of two.
//! - [`detect`] – the multi-scale pipeline: reduce, filter, expand, sum, rectify.
//! - [`baselines`] – threshold, contrast, k-means, pulse-phase and principal
//!   component thermography for comparison.
//! - [`heatsim`] – explicit finite-volume heat conduction producing synthetic
//!   surface-temperature sequences with ground-truth defect masks.
//!
//! # Features
//!
//! - `std` *(default)* – links the standard library.
//! - `parallel` – row-parallel convolution, per-pixel parallel transforms and
//!   data-parallel simulation steps via `rayon`. Per-pixel reduction order is
//!   fixed, so results are bit-identical to the serial path.

extern crate alloc;

pub mod baselines;
pub mod convolve;
pub mod detect;
mod error;
pub mod frame;
pub mod heatsim;
pub mod logkernel;
mod par;
pub mod pyramid;

pub use convolve::{convolve, BorderPolicy, Kernel};
pub use detect::{detect_multiscale, detect_single_level, rectify, DetectConfig, DetectionMap};
pub use error::{Error, Result};
pub use frame::{frame_stats, subtract, FrameStats, ThermalFrame, ThermalSequence};
pub use logkernel::{build_log_kernel, sigma_from_radius, LoGParams};
