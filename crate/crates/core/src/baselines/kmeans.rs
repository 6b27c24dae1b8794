//! Lloyd's k-means on scalar pixel temperatures.

use alloc::format;
use alloc::vec::Vec;

use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frame::ThermalFrame;

pub const MAX_ITERATIONS: usize = 300;
pub const CONVERGENCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansResult {
    pub width: usize,
    pub height: usize,
    /// Cluster index per pixel; clusters are numbered by ascending centroid.
    pub labels: Vec<usize>,
    /// Ascending.
    pub centroids: Vec<f64>,
    /// Within-cluster sum of squares of the final assignment.
    pub inertia: f64,
    pub iterations: usize,
    /// Inertia after each assignment step; non-increasing.
    pub inertia_history: Vec<f64>,
}

impl KMeansResult {
    pub fn label_frame(&self) -> ThermalFrame {
        let data = self.labels.iter().map(|&l| l as f64).collect();
        ThermalFrame::from_raw(self.width, self.height, None, data)
    }
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn nearest(v: f64, centroids: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, &c) in centroids.iter().enumerate() {
        let d = (v - c) * (v - c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// k-means++ seeding driven by a ChaCha8 stream from `seed`.
fn seed_centroids(values: &[f64], k: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = Vec::with_capacity(k);
    let first = (unit_f64(&mut rng) * values.len() as f64) as usize;
    centroids.push(values[first.min(values.len() - 1)]);
    let mut d2: Vec<f64> = values
        .iter()
        .map(|&v| (v - centroids[0]) * (v - centroids[0]))
        .collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let target = unit_f64(&mut rng) * total;
        let mut acc = 0.0;
        // points equal to an existing centroid have zero weight
        let mut pick = d2.iter().rposition(|&d| d > 0.0).unwrap_or(0);
        for (i, &d) in d2.iter().enumerate() {
            acc += d;
            if d > 0.0 && acc > target {
                pick = i;
                break;
            }
        }
        let c = values[pick];
        centroids.push(c);
        for (d, &v) in d2.iter_mut().zip(values) {
            *d = d.min((v - c) * (v - c));
        }
    }
    centroids
}

/// Clusters the frame's temperatures into `k ≥ 2` groups.
///
/// Deterministic for a given `seed`. Iterates until no centroid moves by
/// more than [`CONVERGENCE_TOLERANCE`] or [`MAX_ITERATIONS`] is reached.
pub fn kmeans_cluster(frame: &ThermalFrame, k: usize, seed: u64) -> Result<KMeansResult> {
    if k < 2 {
        return Err(Error::Domain(format!("k must be at least 2, got {k}")));
    }
    let values = frame.data();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    if k > sorted.len() {
        return Err(Error::Degenerate(format!(
            "k = {k} exceeds the {} distinct temperatures in the frame",
            sorted.len()
        )));
    }

    let mut centroids = seed_centroids(values, k, seed);
    let mut labels = alloc::vec![0usize; values.len()];
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let mut inertia = 0.0;
        for (l, &v) in labels.iter_mut().zip(values) {
            let (j, d) = nearest(v, &centroids);
            *l = j;
            inertia += d;
        }
        if let Some(&prev) = history.last() {
            debug_assert!(
                inertia <= prev * (1.0 + 1e-12) + 1e-300,
                "k-means inertia increased: {prev} -> {inertia}"
            );
        }
        history.push(inertia);

        let mut sums = alloc::vec![0.0; k];
        let mut counts = alloc::vec![0usize; k];
        for (&l, &v) in labels.iter().zip(values) {
            sums[l] += v;
            counts[l] += 1;
        }
        let mut movement: f64 = 0.0;
        for j in 0..k {
            if counts[j] > 0 {
                let c = sums[j] / counts[j] as f64;
                movement = movement.max((c - centroids[j]).abs());
                centroids[j] = c;
            }
        }
        if movement < CONVERGENCE_TOLERANCE || iterations >= MAX_ITERATIONS {
            break;
        }
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| centroids[a].total_cmp(&centroids[b]));
    let centroids: Vec<f64> = order.iter().map(|&j| centroids[j]).collect();
    let mut inertia = 0.0;
    for (l, &v) in labels.iter_mut().zip(values) {
        let (j, d) = nearest(v, &centroids);
        *l = j;
        inertia += d;
    }
    Ok(KMeansResult {
        width: frame.width(),
        height: frame.height(),
        labels,
        centroids,
        inertia,
        iterations,
        inertia_history: history,
    })
}
