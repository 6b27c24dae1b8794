//! Comparison methods: single-frame contrast methods (threshold, contrast
//! reconstruction, k-means) and time-series methods (pulse-phase and
//! principal component thermography).

mod fft;
pub mod kmeans;
pub mod pct;
pub mod ppt;
mod svd;
pub mod threshold;

pub use fft::{dft_naive, Fft};
pub use kmeans::{kmeans_cluster, KMeansResult};
pub use pct::{pct_transform, ComponentStack};
pub use ppt::{ppt_phase_at, ppt_transform, PhaseSelection, PhaseStack};
pub use threshold::{contrast_reconstruct, hard_threshold};
