//! TOML simulation specs.
//!
//! ```toml
//! [slab]
//! size = [0.6, 0.6, 0.2]        # x, y, depth in meters
//! spacing = 0.005
//! base = "concrete"             # or { conductivity = .., density = .., specific_heat = .. }
//!
//! [[inclusion]]
//! name = "d15_4x4"
//! x = [0.0992, 0.2008]
//! y = [0.0992, 0.2008]
//! depth = 0.0381                # top face below the surface
//! thickness = 0.00396875
//! material = "foam"
//!
//! [boundary]
//! ambient = 24.0                # °C
//! film = 20.0                   # W/(m²·K)
//! flux = { steps = [[0, 600], [13200, 0]] }
//!
//! [run]
//! duration = 21540.0
//! output_stride = 24
//! initial_temperature = 24.0
//! dt = 2.5                      # optional; defaults to the stability limit
//! ```
//!
//! A schedule is a number, `{ steps = [[t, v], ...] }`,
//! `{ points = [[t, v], ...], interpolation = "linear" | "step" }`, or
//! `{ file = "flux.csv", interpolation = ... }` naming a two-column
//! `time_s,value` CSV relative to the spec file.

use std::path::Path;

use serde::Deserialize;
use thermolap_core::heatsim::scenario::Scenario;
use thermolap_core::heatsim::{BoundarySchedule, Inclusion, Interpolation, Material, Schedule, SimConfig, SlabSpec};

use crate::error::{CliError, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    slab: SlabSection,
    #[serde(default, rename = "inclusion")]
    inclusions: Vec<InclusionSection>,
    boundary: BoundarySection,
    run: RunSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SlabSection {
    size: [f64; 3],
    spacing: f64,
    #[serde(default = "concrete")]
    base: MaterialSpec,
}

fn concrete() -> MaterialSpec {
    MaterialSpec::Named("concrete".into())
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum MaterialSpec {
    Named(String),
    Custom {
        conductivity: f64,
        density: f64,
        specific_heat: f64,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InclusionSection {
    name: String,
    x: [f64; 2],
    y: [f64; 2],
    depth: f64,
    thickness: f64,
    #[serde(default = "foam")]
    material: MaterialSpec,
}

fn foam() -> MaterialSpec {
    MaterialSpec::Named("foam".into())
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundarySection {
    ambient: ScheduleSpec,
    film: ScheduleSpec,
    flux: ScheduleSpec,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum ScheduleSpec {
    Constant(f64),
    Steps {
        steps: Vec<[f64; 2]>,
    },
    Points {
        points: Vec<[f64; 2]>,
        #[serde(default)]
        interpolation: InterpolationSpec,
    },
    File {
        file: String,
        #[serde(default)]
        interpolation: InterpolationSpec,
    },
}

#[derive(Debug, Default, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum InterpolationSpec {
    #[default]
    Linear,
    Step,
}

impl From<InterpolationSpec> for Interpolation {
    fn from(i: InterpolationSpec) -> Self {
        match i {
            InterpolationSpec::Linear => Interpolation::Linear,
            InterpolationSpec::Step => Interpolation::Step,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    duration: f64,
    output_stride: usize,
    initial_temperature: f64,
    dt: Option<f64>,
}

fn material(spec: &MaterialSpec) -> Result<Material> {
    match spec {
        MaterialSpec::Named(n) => match n.to_ascii_lowercase().as_str() {
            "concrete" => Ok(Material::CONCRETE),
            "foam" => Ok(Material::FOAM),
            _ => Err(CliError::Format(format!(
                "unknown material {n:?}; use concrete, foam or a table"
            ))),
        },
        MaterialSpec::Custom {
            conductivity,
            density,
            specific_heat,
        } => Ok(Material::new(*conductivity, *density, *specific_heat)?),
    }
}

fn pairs(p: &[[f64; 2]]) -> Vec<(f64, f64)> {
    p.iter().map(|&[t, v]| (t, v)).collect()
}

/// Reads a `time_s,value` table; a non-numeric first line is a header.
pub fn read_schedule_csv(path: &Path) -> Result<Vec<(f64, f64)>> {
    let grid = crate::grid_csv::read(path)?;
    if grid.width() != 2 {
        return Err(CliError::Format(format!(
            "{}: schedule tables need 2 columns, found {}",
            path.display(),
            grid.width()
        )));
    }
    Ok(grid.data().chunks_exact(2).map(|c| (c[0], c[1])).collect())
}

fn schedule(spec: &ScheduleSpec, base_dir: &Path) -> Result<Schedule> {
    Ok(match spec {
        ScheduleSpec::Constant(v) => Schedule::Constant(*v),
        ScheduleSpec::Steps { steps } => Schedule::steps(pairs(steps))?,
        ScheduleSpec::Points { points, interpolation } => Schedule::table(pairs(points), (*interpolation).into())?,
        ScheduleSpec::File { file, interpolation } => {
            Schedule::table(read_schedule_csv(&base_dir.join(file))?, (*interpolation).into())?
        }
    })
}

/// Parses spec text. Schedule files resolve against `base_dir`.
pub fn parse(text: &str, base_dir: &Path) -> Result<Scenario> {
    let raw: SpecFile = toml::from_str(text).map_err(|e| CliError::Format(format!("spec: {e}")))?;
    let inclusions = raw
        .inclusions
        .iter()
        .map(|i| {
            Ok(Inclusion {
                name: i.name.clone(),
                x: (i.x[0], i.x[1]),
                y: (i.y[0], i.y[1]),
                depth: i.depth,
                thickness: i.thickness,
                material: material(&i.material)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let slab = SlabSpec {
        size: (raw.slab.size[0], raw.slab.size[1], raw.slab.size[2]),
        spacing: raw.slab.spacing,
        base: material(&raw.slab.base)?,
        inclusions,
    };
    let boundary = BoundarySchedule {
        ambient_temperature: schedule(&raw.boundary.ambient, base_dir)?,
        film_coefficient: schedule(&raw.boundary.film, base_dir)?,
        top_flux: schedule(&raw.boundary.flux, base_dir)?,
    };
    let config = SimConfig {
        dt: raw.run.dt,
        duration: raw.run.duration,
        output_stride: raw.run.output_stride,
        initial_temperature: raw.run.initial_temperature,
    };
    Ok(Scenario { slab, boundary, config })
}

pub fn read(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse(&text, path.parent().unwrap_or(Path::new(".")))
}
