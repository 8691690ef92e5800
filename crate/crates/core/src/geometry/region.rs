use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::grid::{Axis, Grid, Rect};

/// Interface between two regions: the interior faces where they meet.
#[derive(Debug, Clone)]
pub struct Interface {
    /// Region pair, lower index first (0-based).
    pub pair: (usize, usize),
    /// Indices into `grid.interior_faces()`.
    pub faces: Vec<usize>,
    /// Total interface length.
    pub length: f64,
}

/// Assignment of every active cell to exactly one player region.
#[derive(Debug, Clone)]
pub struct RegionPartition {
    region_of_cell: Vec<usize>,
    cells_of_region: Vec<Vec<usize>>,
    areas: Vec<f64>,
    interfaces: Vec<Interface>,
}

impl RegionPartition {
    /// Assign cells to players from per-player rectangle lists. The rectangles
    /// must align with cell faces, cover the active region and not overlap.
    pub fn build(grid: &Grid, regions: &[Vec<Rect>]) -> Result<RegionPartition> {
        let players = regions.len();
        if players == 0 {
            return Err(Error::InvalidPartition("no regions given".into()));
        }
        let (x0, y0) = grid.origin();
        for (r, rects) in regions.iter().enumerate() {
            if rects.is_empty() {
                return Err(Error::InvalidPartition(format!("region {} has no rectangles", r + 1)));
            }
            for rect in rects {
                for (coord, origin, h) in [
                    (rect.x[0], x0, grid.hx()),
                    (rect.x[1], x0, grid.hx()),
                    (rect.y[0], y0, grid.hy()),
                    (rect.y[1], y0, grid.hy()),
                ] {
                    let t = (coord - origin) / h;
                    if (t - t.round()).abs() > 1e-9 * t.abs().max(1.0) {
                        return Err(Error::InvalidPartition(format!(
                            "region {} boundary at {coord} cuts through a cell",
                            r + 1
                        )));
                    }
                }
            }
        }

        let mut region_of_cell = vec![usize::MAX; grid.n_cells()];
        for c in 0..grid.n_cells() {
            let (x, y) = grid.cell_center(c);
            for (r, rects) in regions.iter().enumerate() {
                if rects.iter().any(|rect| rect.contains(x, y)) {
                    if region_of_cell[c] != usize::MAX {
                        return Err(Error::InvalidPartition(format!(
                            "cell at ({x}, {y}) lies in regions {} and {}",
                            region_of_cell[c] + 1,
                            r + 1
                        )));
                    }
                    region_of_cell[c] = r;
                }
            }
            if region_of_cell[c] == usize::MAX {
                return Err(Error::InvalidPartition(format!(
                    "cell at ({x}, {y}) is not covered by any region"
                )));
            }
        }

        // A region rectangle must not reach outside the active domain.
        for (r, rects) in regions.iter().enumerate() {
            for rect in rects {
                let i0 = ((rect.x[0] - x0) / grid.hx()).round() as usize;
                let i1 = ((rect.x[1] - x0) / grid.hx()).round() as usize;
                let j0 = ((rect.y[0] - y0) / grid.hy()).round() as usize;
                let j1 = ((rect.y[1] - y0) / grid.hy()).round() as usize;
                for j in j0..j1 {
                    for i in i0..i1 {
                        if !grid.is_active(i, j) {
                            return Err(Error::InvalidPartition(format!(
                                "region {} extends outside the domain",
                                r + 1
                            )));
                        }
                    }
                }
            }
        }

        let mut cells_of_region = vec![Vec::new(); players];
        for (c, &r) in region_of_cell.iter().enumerate() {
            cells_of_region[r].push(c);
        }
        if let Some(r) = cells_of_region.iter().position(|cells| cells.is_empty()) {
            return Err(Error::InvalidPartition(format!("region {} contains no cells", r + 1)));
        }

        let areas: Vec<f64> = cells_of_region
            .iter()
            .map(|cells| cells.len() as f64 * grid.cell_volume())
            .collect();

        let mut by_pair: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        for (f, face) in grid.interior_faces().iter().enumerate() {
            let (ra, rb) = (region_of_cell[face.lo], region_of_cell[face.hi]);
            if ra != rb {
                let key = (ra.min(rb), ra.max(rb));
                by_pair.entry(key).or_default().push(f);
            }
        }
        let interfaces = by_pair
            .into_iter()
            .map(|(pair, faces)| {
                let length = faces
                    .iter()
                    .map(|&f| grid.face_length(grid.interior_faces()[f].axis))
                    .sum();
                Interface { pair, faces, length }
            })
            .collect();

        Ok(RegionPartition { region_of_cell, cells_of_region, areas, interfaces })
    }

    pub fn players(&self) -> usize {
        self.cells_of_region.len()
    }

    /// 0-based region index of a compact cell.
    pub fn region_of(&self, cell: usize) -> usize {
        self.region_of_cell[cell]
    }

    pub fn cells_of(&self, region: usize) -> &[usize] {
        &self.cells_of_region[region]
    }

    /// Region area m_i.
    pub fn area(&self, region: usize) -> f64 {
        self.areas[region]
    }

    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    pub fn interfaces(&self) -> &[Interface] {
        &self.interfaces
    }

    pub fn interface(&self, a: usize, b: usize) -> Option<&Interface> {
        let key = (a.min(b), a.max(b));
        self.interfaces.iter().find(|i| i.pair == key)
    }

    /// Mean of `field` over the cells of `region`.
    pub fn region_mean(&self, region: usize, field: &Field) -> f64 {
        let cells = &self.cells_of_region[region];
        cells.iter().map(|&c| field[c]).sum::<f64>() / cells.len() as f64
    }

    /// Integral of `field` over the cells of `region` (midpoint rule).
    pub fn region_integral(&self, region: usize, field: &Field, grid: &Grid) -> f64 {
        grid.cell_volume() * self.cells_of_region[region].iter().map(|&c| field[c]).sum::<f64>()
    }

    /// Cell of `region` where `field` attains its maximum, with its center.
    pub fn region_argmax(&self, region: usize, field: &Field, grid: &Grid) -> (usize, (f64, f64)) {
        let c = *self.cells_of_region[region]
            .iter()
            .max_by(|&&a, &&b| field[a].partial_cmp(&field[b]).unwrap())
            .unwrap();
        (c, grid.cell_center(c))
    }
}

/// Length of an interface along one axis, for tests and diagnostics.
pub fn interface_length_along(grid: &Grid, interface: &Interface, axis: Axis) -> f64 {
    interface
        .faces
        .iter()
        .filter(|&&f| grid.interior_faces()[f].axis == axis)
        .map(|&f| grid.face_length(grid.interior_faces()[f].axis))
        .sum()
}
