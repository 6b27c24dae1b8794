//! Explicit finite-volume conduction on a uniform voxel grid.
//!
//! Neighbouring cells exchange `G (T_n - T_c)` with the face conductance
//! `G = h · 2 k₁k₂ / (k₁ + k₂)` (harmonic-mean conductivity over face area
//! `h²` and centre distance `h`). Top cells also receive the absorbed flux
//! `q · h²` and convective exchange through half a cell in series with the
//! film: `G_conv = h² / (1/h_film + h / 2k)`. Everything else is adiabatic.
//! Because each face contributes equal and opposite terms to its two cells,
//! the update conserves energy up to rounding.

use alloc::format;
use alloc::vec::Vec;

use super::grid::VoxelGrid;
use super::schedule::{BoundarySchedule, BoundaryValues};
use crate::error::{Error, Result};
use crate::par;

/// Fraction of the explicit stability limit a time step may use.
pub const STABILITY_SAFETY: f64 = 0.9;

/// Precomputed capacities and conductances of a voxel grid.
#[derive(Debug, Clone)]
pub struct ThermalModel {
    grid: VoxelGrid,
    /// ρ c V per cell, J/K.
    capacity: Vec<f64>,
    /// Conductance to the `+x` / `+y` / `+z` neighbour (0 on the far face).
    gx: Vec<f64>,
    gy: Vec<f64>,
    gz: Vec<f64>,
    /// `h / 2k` of each top cell, m²K/W.
    top_half_resistance: Vec<f64>,
    /// Σ internal conductances per cell, W/K.
    internal_sum: Vec<f64>,
}

fn face_conductance(k1: f64, k2: f64, h: f64) -> f64 {
    h * 2.0 * k1 * k2 / (k1 + k2)
}

impl ThermalModel {
    pub fn new(grid: VoxelGrid) -> Self {
        let (nx, ny, nz, h) = (grid.nx, grid.ny, grid.nz, grid.spacing);
        let n = grid.cell_count();
        let volume = h * h * h;
        let k_of = |c: usize| grid.materials[grid.cell_material[c] as usize].conductivity;
        let mut capacity = Vec::with_capacity(n);
        let mut gx = alloc::vec![0.0; n];
        let mut gy = alloc::vec![0.0; n];
        let mut gz = alloc::vec![0.0; n];
        for c in 0..n {
            let m = &grid.materials[grid.cell_material[c] as usize];
            capacity.push(m.volumetric_heat_capacity() * volume);
        }
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let c = grid.index(i, j, k);
                    if i + 1 < nx {
                        gx[c] = face_conductance(k_of(c), k_of(c + 1), h);
                    }
                    if j + 1 < ny {
                        gy[c] = face_conductance(k_of(c), k_of(c + nx), h);
                    }
                    if k + 1 < nz {
                        gz[c] = face_conductance(k_of(c), k_of(c + nx * ny), h);
                    }
                }
            }
        }
        let mut internal_sum = alloc::vec![0.0; n];
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let c = grid.index(i, j, k);
                    let mut s = gx[c] + gy[c] + gz[c];
                    if i > 0 {
                        s += gx[c - 1];
                    }
                    if j > 0 {
                        s += gy[c - nx];
                    }
                    if k > 0 {
                        s += gz[c - nx * ny];
                    }
                    internal_sum[c] = s;
                }
            }
        }
        let top_half_resistance = (0..nx * ny).map(|c| h / (2.0 * k_of(c))).collect();
        Self {
            grid,
            capacity,
            gx,
            gy,
            gz,
            top_half_resistance,
            internal_sum,
        }
    }

    pub fn grid(&self) -> &VoxelGrid {
        &self.grid
    }

    fn face_area(&self) -> f64 {
        self.grid.spacing * self.grid.spacing
    }

    fn convective_conductance(&self, top_cell: usize, film: f64) -> f64 {
        if film <= 0.0 {
            return 0.0;
        }
        self.face_area() / (1.0 / film + self.top_half_resistance[top_cell])
    }

    /// Largest stable step for film coefficients up to `max_film`:
    /// `0.9 · min_c C_c / Σ G_c`.
    pub fn stability_limit(&self, max_film: f64) -> f64 {
        let plane = self.grid.nx * self.grid.ny;
        let mut limit = f64::INFINITY;
        for (c, (&cap, &g)) in self.capacity.iter().zip(&self.internal_sum).enumerate() {
            let total = if c < plane {
                g + self.convective_conductance(c, max_film)
            } else {
                g
            };
            if total > 0.0 {
                limit = limit.min(cap / total);
            }
        }
        STABILITY_SAFETY * limit
    }

    /// Σ C_c T_c, J relative to 0 °C.
    pub fn total_energy(&self, temperatures: &[f64]) -> f64 {
        self.capacity.iter().zip(temperatures).map(|(c, t)| c * t).sum()
    }

    /// Surface temperature of the top face above each top cell, from the
    /// steady balance of flux, film and the half-cell conduction path.
    pub fn surface_temperatures(&self, temperatures: &[f64], bc: &BoundaryValues) -> Vec<f64> {
        (0..self.grid.nx * self.grid.ny)
            .map(|c| {
                let inv_r = 1.0 / self.top_half_resistance[c];
                (bc.flux + bc.film_coefficient * bc.ambient + inv_r * temperatures[c]) / (bc.film_coefficient + inv_r)
            })
            .collect()
    }

    /// Advances `temperatures` by `dt` into `next`; returns the heat that
    /// entered through the top face (J).
    pub fn step_into(&self, temperatures: &[f64], next: &mut [f64], bc: &BoundaryValues, dt: f64) -> f64 {
        let (nx, ny, nz) = (self.grid.nx, self.grid.ny, self.grid.nz);
        let plane = nx * ny;
        let area = self.face_area();
        let s = temperatures;
        par::for_each_chunk(next, nx, |row, out| {
            let k = row / ny;
            let j = row % ny;
            let base = row * nx;
            for (i, o) in out.iter_mut().enumerate() {
                let c = base + i;
                let t = s[c];
                let mut q = 0.0;
                if i > 0 {
                    q += self.gx[c - 1] * (s[c - 1] - t);
                }
                if i + 1 < nx {
                    q += self.gx[c] * (s[c + 1] - t);
                }
                if j > 0 {
                    q += self.gy[c - nx] * (s[c - nx] - t);
                }
                if j + 1 < ny {
                    q += self.gy[c] * (s[c + nx] - t);
                }
                if k > 0 {
                    q += self.gz[c - plane] * (s[c - plane] - t);
                }
                if k + 1 < nz {
                    q += self.gz[c] * (s[c + plane] - t);
                }
                if k == 0 {
                    q += area * bc.flux + self.convective_conductance(c, bc.film_coefficient) * (bc.ambient - t);
                }
                *o = t + dt / self.capacity[c] * q;
            }
        });
        (0..plane)
            .map(|c| (area * bc.flux + self.convective_conductance(c, bc.film_coefficient) * (bc.ambient - s[c])) * dt)
            .sum()
    }
}

/// Cell temperatures at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub time: f64,
    pub temperatures: Vec<f64>,
}

impl SimState {
    pub fn uniform(model: &ThermalModel, temperature: f64) -> Self {
        Self {
            time: 0.0,
            temperatures: alloc::vec![temperature; model.grid().cell_count()],
        }
    }
}

/// Result of a single [`step`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: SimState,
    /// Heat entering through the top face during the step, J.
    pub boundary_inflow: f64,
}

/// One explicit step with boundary values taken at `state.time`.
pub fn step(model: &ThermalModel, state: &SimState, boundary: &BoundarySchedule, dt: f64) -> Result<StepOutcome> {
    let limit = model.stability_limit(boundary.film_coefficient.max_value());
    if !(dt > 0.0 && dt <= limit) {
        return Err(Error::Instability(format!(
            "time step {dt} s outside the stable range (0, {limit}] s"
        )));
    }
    if state.temperatures.len() != model.grid().cell_count() {
        return Err(Error::DimensionMismatch(format!(
            "state has {} cells, grid has {}",
            state.temperatures.len(),
            model.grid().cell_count()
        )));
    }
    let mut next = alloc::vec![0.0; state.temperatures.len()];
    let bc = boundary.at(state.time);
    let inflow = model.step_into(&state.temperatures, &mut next, &bc, dt);
    Ok(StepOutcome {
        state: SimState {
            time: state.time + dt,
            temperatures: next,
        },
        boundary_inflow: inflow,
    })
}
