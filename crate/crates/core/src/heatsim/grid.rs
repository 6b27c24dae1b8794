use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::frame::Mask;

/// Thermal properties of one material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    /// W/(m·K)
    pub conductivity: f64,
    /// kg/m³
    pub density: f64,
    /// J/(kg·K)
    pub specific_heat: f64,
}

impl Material {
    /// Typical structural concrete.
    pub const CONCRETE: Material = Material {
        conductivity: 1.8,
        density: 2300.0,
        specific_heat: 880.0,
    };

    /// Expanded polystyrene with k = 0.03 W/(m·K).
    pub const FOAM: Material = Material {
        conductivity: 0.03,
        density: 30.0,
        specific_heat: 1300.0,
    };

    pub fn new(conductivity: f64, density: f64, specific_heat: f64) -> Result<Self> {
        let m = Self {
            conductivity,
            density,
            specific_heat,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("conductivity", self.conductivity),
            ("density", self.density),
            ("specific heat", self.specific_heat),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("material {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// ρ·c, J/(m³·K).
    pub fn volumetric_heat_capacity(&self) -> f64 {
        self.density * self.specific_heat
    }

    pub fn diffusivity(&self) -> f64 {
        self.conductivity / self.volumetric_heat_capacity()
    }
}

/// A box-shaped embedded inclusion, in meters. `x`/`y` give the footprint
/// on the top face; `depth` is measured from the top face to the
/// inclusion's upper surface.
#[derive(Debug, Clone, PartialEq)]
pub struct Inclusion {
    pub name: String,
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub depth: f64,
    pub thickness: f64,
    pub material: Material,
}

/// Slab geometry and materials.
#[derive(Debug, Clone, PartialEq)]
pub struct SlabSpec {
    /// `(x, y, z)` extents in meters; `z` is the thickness.
    pub size: (f64, f64, f64),
    /// Cubic cell edge, meters.
    pub spacing: f64,
    pub base: Material,
    pub inclusions: Vec<Inclusion>,
}

/// Cell index ranges (half-open) of one inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellBox {
    pub i: (usize, usize),
    pub j: (usize, usize),
    pub k: (usize, usize),
}

/// Voxelized slab. Layer `k = 0` touches the top face.
#[derive(Debug, Clone, PartialEq)]
pub struct VoxelGrid {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
    pub spacing: f64,
    /// Index 0 is the base material, `i + 1` is inclusion `i`.
    pub materials: Vec<Material>,
    pub cell_material: Vec<u16>,
    pub inclusion_cells: Vec<CellBox>,
}

impl VoxelGrid {
    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.ny + j) * self.nx + i
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn material_at(&self, i: usize, j: usize, k: usize) -> &Material {
        &self.materials[self.cell_material[self.index(i, j, k)] as usize]
    }

    /// Number of cells per entry of [`VoxelGrid::materials`].
    pub fn voxel_report(&self) -> Vec<usize> {
        let mut counts = alloc::vec![0; self.materials.len()];
        for &m in &self.cell_material {
            counts[m as usize] += 1;
        }
        counts
    }

    /// Top-face footprint of each inclusion, as `nx × ny` masks.
    pub fn footprint_masks(&self) -> Vec<Mask> {
        self.inclusion_cells
            .iter()
            .map(|b| {
                let mut data = alloc::vec![false; self.nx * self.ny];
                for j in b.j.0..b.j.1 {
                    for i in b.i.0..b.i.1 {
                        data[j * self.nx + i] = true;
                    }
                }
                Mask {
                    width: self.nx,
                    height: self.ny,
                    data,
                }
            })
            .collect()
    }
}

fn cells_along(extent: f64, spacing: f64, axis: &str) -> Result<usize> {
    let n = libm::round(extent / spacing);
    if n.is_nan() || n < 1.0 || (n * spacing - extent).abs() > 1e-6 * extent.max(spacing) {
        return Err(Error::Geometry(format!(
            "{axis} extent {extent} m is not a whole number of {spacing} m cells"
        )));
    }
    Ok(n as usize)
}

/// Assigns a material to every cell.
///
/// Footprint cells are those with centres inside the rectangle (boundaries
/// rounded to the nearest cell face). Vertically an inclusion starts at the
/// face nearest `depth` and spans `round(thickness / spacing)` layers, which
/// must be at least one.
pub fn build_grid(spec: &SlabSpec) -> Result<VoxelGrid> {
    let h = spec.spacing;
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Geometry(format!("grid spacing must be positive, got {h}")));
    }
    spec.base.validate()?;
    let (lx, ly, lz) = spec.size;
    let nx = cells_along(lx, h, "x")?;
    let ny = cells_along(ly, h, "y")?;
    let nz = cells_along(lz, h, "z")?;
    if spec.inclusions.len() >= u16::MAX as usize {
        return Err(Error::Geometry("too many inclusions".into()));
    }

    let mut materials = alloc::vec![spec.base];
    let mut boxes: Vec<CellBox> = Vec::with_capacity(spec.inclusions.len());
    for inc in &spec.inclusions {
        inc.material.validate()?;
        let name = &inc.name;
        let inside = inc.x.0 > 0.0
            && inc.x.1 < lx
            && inc.x.0 < inc.x.1
            && inc.y.0 > 0.0
            && inc.y.1 < ly
            && inc.y.0 < inc.y.1
            && inc.depth > 0.0
            && inc.thickness > 0.0
            && inc.depth + inc.thickness < lz;
        if !inside {
            return Err(Error::Geometry(format!(
                "inclusion '{name}' does not lie strictly inside the slab"
            )));
        }
        let face = |v: f64| libm::round(v / h) as usize;
        let layers = face(inc.thickness);
        if layers == 0 {
            return Err(Error::Geometry(format!(
                "inclusion '{name}' thickness {} m is under-resolved by {h} m cells",
                inc.thickness
            )));
        }
        let b = CellBox {
            i: (face(inc.x.0), face(inc.x.1)),
            j: (face(inc.y.0), face(inc.y.1)),
            k: (face(inc.depth), face(inc.depth) + layers),
        };
        if b.i.0 >= b.i.1 || b.j.0 >= b.j.1 {
            return Err(Error::Geometry(format!(
                "inclusion '{name}' footprint is smaller than one cell"
            )));
        }
        if b.k.0 == 0 || b.k.1 >= nz {
            return Err(Error::Geometry(format!(
                "inclusion '{name}' must leave at least one cell above and below it"
            )));
        }
        if let Some(other) = boxes
            .iter()
            .position(|o| o.i.0 < b.i.1 && b.i.0 < o.i.1 && o.j.0 < b.j.1 && b.j.0 < o.j.1)
        {
            return Err(Error::Geometry(format!(
                "inclusion '{name}' footprint overlaps '{}'",
                spec.inclusions[other].name
            )));
        }
        boxes.push(b);
        materials.push(inc.material);
    }

    let mut cell_material = alloc::vec![0u16; nx * ny * nz];
    for (n, b) in boxes.iter().enumerate() {
        for k in b.k.0..b.k.1 {
            for j in b.j.0..b.j.1 {
                for i in b.i.0..b.i.1 {
                    cell_material[(k * ny + j) * nx + i] = (n + 1) as u16;
                }
            }
        }
    }
    Ok(VoxelGrid {
        nx,
        ny,
        nz,
        spacing: h,
        materials,
        cell_material,
        inclusion_cells: boxes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slab(inclusions: Vec<Inclusion>, spacing: f64) -> SlabSpec {
        SlabSpec {
            size: (0.4, 0.4, 0.2),
            spacing,
            base: Material::CONCRETE,
            inclusions,
        }
    }

    fn foam(name: &str, x: (f64, f64), y: (f64, f64), depth: f64, thickness: f64) -> Inclusion {
        Inclusion {
            name: name.into(),
            x,
            y,
            depth,
            thickness,
            material: Material::FOAM,
        }
    }

    #[test]
    fn homogeneous_grid() {
        let g = build_grid(&slab(alloc::vec![], 0.02)).unwrap();
        assert_eq!((g.nx, g.ny, g.nz), (20, 20, 10));
        assert_eq!(g.voxel_report(), [4000]);
    }

    #[test]
    fn single_layer_inclusion_index() {
        // 0.1 x 0.1 m at 0.04 m depth, 0.004 m thick on a 0.004 m grid
        let inc = foam("a", (0.1, 0.2), (0.1, 0.2), 0.04, 0.004);
        let spec = SlabSpec {
            size: (0.3, 0.3, 0.2),
            ..slab(alloc::vec![inc], 0.004)
        };
        let g = build_grid(&spec).unwrap();
        let b = g.inclusion_cells[0];
        assert_eq!(b.k, (10, 11));
        assert_eq!(b.i, (25, 50));
        assert_eq!(g.voxel_report()[1], 25 * 25);
        for k in 0..g.nz {
            let foam_here = g.cell_material[g.index(30, 30, k)] == 1;
            assert_eq!(foam_here, k == 10);
        }
    }

    #[test]
    fn geometry_errors() {
        let poking = foam("p", (0.3, 0.45), (0.1, 0.2), 0.04, 0.01);
        assert!(matches!(
            build_grid(&slab(alloc::vec![poking], 0.01)),
            Err(Error::Geometry(_))
        ));
        let thin = foam("t", (0.1, 0.2), (0.1, 0.2), 0.04, 0.004);
        assert!(build_grid(&slab(alloc::vec![thin], 0.01)).is_err());
        let a = foam("a", (0.1, 0.2), (0.1, 0.2), 0.04, 0.01);
        let b = foam("b", (0.15, 0.25), (0.15, 0.25), 0.08, 0.01);
        assert!(build_grid(&slab(alloc::vec![a.clone(), b], 0.01)).is_err());
        let c = foam("c", (0.2, 0.3), (0.1, 0.2), 0.08, 0.01);
        assert!(build_grid(&slab(alloc::vec![a, c], 0.01)).is_ok());
        let mut uneven = slab(alloc::vec![], 0.03);
        uneven.size = (0.4, 0.4, 0.2);
        assert!(build_grid(&uneven).is_err());
    }

    #[test]
    fn masks_match_footprints() {
        let inc = foam("a", (0.1, 0.2), (0.05, 0.1), 0.04, 0.01);
        let g = build_grid(&slab(alloc::vec![inc], 0.01)).unwrap();
        let m = &g.footprint_masks()[0];
        assert_eq!(m.count(), 10 * 5);
        assert!(m.get(10, 5) && m.get(19, 9) && !m.get(20, 9) && !m.get(10, 10));
    }
}
