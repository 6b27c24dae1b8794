//! Ready-made indoor lamp-heating scenario: a concrete slab with foam
//! inclusions at three depths, heated at a constant absorbed flux and then
//! left to cool in still room air.

use alloc::string::ToString;
use alloc::vec::Vec;

use super::{BoundarySchedule, Inclusion, Material, Schedule, SimConfig, SlabSpec};

pub const INCH: f64 = 0.0254;

pub const AMBIENT_C: f64 = 24.0;
pub const FILM_COEFFICIENT: f64 = 20.0;
pub const HEATING_FLUX: f64 = 600.0;
pub const HEATING_SECONDS: f64 = 220.0 * 60.0;
pub const COOLING_SECONDS: f64 = 139.0 * 60.0;
/// 5/32 inch.
pub const FOAM_THICKNESS: f64 = 5.0 / 32.0 * INCH;

/// Slab, boundary schedule and time stepping of one simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub slab: SlabSpec,
    pub boundary: BoundarySchedule,
    pub config: SimConfig,
}

impl Scenario {
    /// Indices of inclusions at `depth_in` inches.
    pub fn inclusions_at_depth(&self, depth_in: f64) -> Vec<usize> {
        self.slab
            .inclusions
            .iter()
            .enumerate()
            .filter(|(_, inc)| (inc.depth - depth_in * INCH).abs() < 1e-9)
            .map(|(i, _)| i)
            .collect()
    }
}

fn foam_square(name: &str, center: (f64, f64), side_in: (f64, f64), depth_in: f64) -> Inclusion {
    let (hx, hy) = (side_in.0 * INCH / 2.0, side_in.1 * INCH / 2.0);
    Inclusion {
        name: name.to_string(),
        x: (center.0 - hx, center.0 + hx),
        y: (center.1 - hy, center.1 + hy),
        depth: depth_in * INCH,
        thickness: FOAM_THICKNESS,
        material: Material::FOAM,
    }
}

/// 0.6 × 0.6 × 0.2 m concrete slab on a 5 mm grid with four foam
/// inclusions, one per quadrant:
///
/// | name      | size (in) | depth (in) |
/// |-----------|-----------|------------|
/// | `d15_4x4` | 4 × 4     | 1.5        |
/// | `d25_4x4` | 4 × 4     | 2.5        |
/// | `d35_4x4` | 4 × 4     | 3.5        |
/// | `d25_6x6` | 6 × 6     | 2.5        |
///
/// Room air at 24 °C with h = 20 W/(m²·K); 600 W/m² absorbed for 220 min,
/// then 139 min of cooling. Frames every 60 s.
pub fn indoor_lab() -> Scenario {
    let slab = SlabSpec {
        size: (0.6, 0.6, 0.2),
        spacing: 0.005,
        base: Material::CONCRETE,
        inclusions: alloc::vec![
            foam_square("d15_4x4", (0.15, 0.15), (4.0, 4.0), 1.5),
            foam_square("d25_4x4", (0.45, 0.15), (4.0, 4.0), 2.5),
            foam_square("d35_4x4", (0.15, 0.45), (4.0, 4.0), 3.5),
            foam_square("d25_6x6", (0.45, 0.45), (6.0, 6.0), 2.5),
        ],
    };
    let boundary = BoundarySchedule {
        ambient_temperature: Schedule::Constant(AMBIENT_C),
        film_coefficient: Schedule::Constant(FILM_COEFFICIENT),
        top_flux: Schedule::steps(alloc::vec![(0.0, HEATING_FLUX), (HEATING_SECONDS, 0.0)]).expect("static schedule"),
    };
    let config = SimConfig {
        dt: Some(2.5),
        duration: HEATING_SECONDS + COOLING_SECONDS,
        output_stride: 24,
        initial_temperature: AMBIENT_C,
    };
    Scenario { slab, boundary, config }
}
