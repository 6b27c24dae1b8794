//! Transient heat conduction in a slab with embedded low-conductivity
//! inclusions, producing noise-free top-surface thermogram sequences with
//! ground-truth footprint masks.
//!
//! The solver is an explicit finite-volume scheme on cubic cells. The top
//! face sees a prescribed absorbed flux plus convection to ambient; the
//! bottom and sides are adiabatic. The time step is bounded by the usual
//! explicit stability limit, which [`run`] derives when none is given.

mod grid;
pub mod scenario;
mod schedule;
mod solver;

use alloc::format;
use alloc::vec::Vec;

pub use grid::{build_grid, CellBox, Inclusion, Material, SlabSpec, VoxelGrid};
pub use schedule::{BoundarySchedule, BoundaryValues, Interpolation, Schedule};
pub use solver::{step, SimState, StepOutcome, ThermalModel, STABILITY_SAFETY};

use crate::error::{Error, Result};
use crate::frame::{Mask, ThermalFrame, ThermalSequence};

/// Time stepping and output sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Seconds; `None` uses the stability limit.
    pub dt: Option<f64>,
    /// Seconds.
    pub duration: f64,
    /// Steps between recorded frames.
    pub output_stride: usize,
    /// °C, applied to every cell.
    pub initial_temperature: f64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::Config(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        if self.output_stride == 0 {
            return Err(Error::Config("output stride must be at least 1".into()));
        }
        if !self.initial_temperature.is_finite() {
            return Err(Error::Config("initial temperature must be finite".into()));
        }
        if let Some(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::Config(format!("dt must be positive, got {dt}")));
            }
        }
        Ok(())
    }
}

/// Energy bookkeeping over a run, joules relative to 0 °C.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBalance {
    pub initial: f64,
    pub final_energy: f64,
    /// Total heat that entered through the top face.
    pub boundary_inflow: f64,
}

impl EnergyBalance {
    /// `|ΔE - inflow| / max(|inflow|, |ΔE|)`, 0 when nothing happened.
    pub fn relative_error(&self) -> f64 {
        let change = self.final_energy - self.initial;
        let scale = change.abs().max(self.boundary_inflow.abs());
        if scale == 0.0 {
            0.0
        } else {
            (change - self.boundary_inflow).abs() / scale
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    /// Top-surface temperatures, first frame at t = 0.
    pub sequence: ThermalSequence,
    /// Time of each frame, seconds.
    pub times: Vec<f64>,
    /// One footprint mask per inclusion, in spec order.
    pub masks: Vec<Mask>,
    pub dt: f64,
    pub steps: usize,
    pub energy: EnergyBalance,
    /// Cells per material, base first.
    pub voxel_counts: Vec<usize>,
}

/// Temperatures outside `[min(IC, ambient) - 50, max(IC, ambient) + 500]`
/// abort a run.
pub fn divergence_bounds(config: &SimConfig, boundary: &BoundarySchedule) -> (f64, f64) {
    let lo = config.initial_temperature.min(boundary.ambient_temperature.min_value()) - 50.0;
    let hi = config.initial_temperature.max(boundary.ambient_temperature.max_value()) + 500.0;
    (lo, hi)
}

/// Simulates the slab and samples its top surface every `output_stride`
/// steps.
pub fn run(spec: &SlabSpec, boundary: &BoundarySchedule, config: &SimConfig) -> Result<SimOutput> {
    config.validate()?;
    boundary.validate(config.duration)?;
    let grid = build_grid(spec)?;
    let voxel_counts = grid.voxel_report();
    let masks = grid.footprint_masks();
    let model = ThermalModel::new(grid);
    let limit = model.stability_limit(boundary.film_coefficient.max_value());
    let dt = match config.dt {
        Some(dt) if dt > limit => {
            return Err(Error::Instability(format!(
                "time step {dt} s exceeds the stability limit {limit} s"
            )))
        }
        Some(dt) => dt,
        None => limit,
    };
    let steps = libm::ceil(config.duration / dt - 1e-9) as usize;
    let (lo, hi) = divergence_bounds(config, boundary);
    let (nx, ny) = (model.grid().nx, model.grid().ny);
    let pitch = Some(spec.spacing);

    let surface_frame = |temps: &[f64], t: f64| -> Result<ThermalFrame> {
        let data = model.surface_temperatures(temps, &boundary.at(t));
        ThermalFrame::new(nx, ny, data)?.with_pixel_pitch(pitch)
    };

    let mut temps = alloc::vec![config.initial_temperature; model.grid().cell_count()];
    let mut next = temps.clone();
    let initial = model.total_energy(&temps);
    let mut inflow = 0.0;
    let mut frames = alloc::vec![surface_frame(&temps, 0.0)?];
    let mut times = alloc::vec![0.0];
    for n in 1..=steps {
        let t = (n - 1) as f64 * dt;
        inflow += model.step_into(&temps, &mut next, &boundary.at(t), dt);
        core::mem::swap(&mut temps, &mut next);
        if let Some(bad) = temps.iter().position(|v| !(*v >= lo && *v <= hi)) {
            return Err(Error::Instability(format!(
                "temperature {} °C at cell {bad} after step {n} left [{lo}, {hi}]",
                temps[bad]
            )));
        }
        if n % config.output_stride == 0 {
            let now = n as f64 * dt;
            frames.push(surface_frame(&temps, now)?);
            times.push(now);
        }
    }
    let energy = EnergyBalance {
        initial,
        final_energy: model.total_energy(&temps),
        boundary_inflow: inflow,
    };
    Ok(SimOutput {
        sequence: ThermalSequence::new(frames, dt * config.output_stride as f64)?,
        times,
        masks,
        dt,
        steps,
        energy,
        voxel_counts,
    })
}

/// Pixels at least `margin` pixels (Chebyshev distance) away from every
/// mask: the intact reference area.
pub fn sound_mask(masks: &[Mask], width: usize, height: usize, margin: usize) -> Mask {
    let mut data = alloc::vec![true; width * height];
    for m in masks {
        for y in 0..height {
            for x in 0..width {
                if m.get(x, y) {
                    let (x0, x1) = (x.saturating_sub(margin), (x + margin).min(width - 1));
                    let (y0, y1) = (y.saturating_sub(margin), (y + margin).min(height - 1));
                    for yy in y0..=y1 {
                        for xx in x0..=x1 {
                            data[yy * width + xx] = false;
                        }
                    }
                }
            }
        }
    }
    Mask { width, height, data }
}

/// Mean of `frame` over the set pixels of `mask`.
pub fn masked_mean(frame: &ThermalFrame, mask: &Mask) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for (&v, &m) in frame.data().iter().zip(&mask.data) {
        if m {
            sum += v;
            n += 1;
        }
    }
    (n > 0).then(|| sum / n as f64)
}

/// Mean over the footprint minus mean over the sound area.
pub fn footprint_contrast(frame: &ThermalFrame, footprint: &Mask, sound: &Mask) -> Option<f64> {
    Some(masked_mean(frame, footprint)? - masked_mean(frame, sound)?)
}
