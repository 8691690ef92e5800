use crate::error::{Error, Result};
use crate::field::{kahan_sum, Field};

/// Axis-aligned rectangle `[x0,x1] x [y0,y1]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Rect {
    pub x: [f64; 2],
    pub y: [f64; 2],
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x: [x0, x1], y: [y0, y1] }
    }

    pub fn area(&self) -> f64 {
        (self.x[1] - self.x[0]) * (self.y[1] - self.y[0])
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x[0] && x <= self.x[1] && y >= self.y[0] && y <= self.y[1]
    }
}

/// Face orientation: X-faces have normals along x, Y-faces along y.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// Outward direction of a boundary face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outward {
    East,
    West,
    North,
    South,
}

impl Outward {
    /// Unit outward normal.
    pub fn normal(self) -> (f64, f64) {
        match self {
            Outward::East => (1.0, 0.0),
            Outward::West => (-1.0, 0.0),
            Outward::North => (0.0, 1.0),
            Outward::South => (0.0, -1.0),
        }
    }

    pub fn axis(self) -> Axis {
        match self {
            Outward::East | Outward::West => Axis::X,
            Outward::North | Outward::South => Axis::Y,
        }
    }
}

/// A face shared by two active cells. `lo` is the west/south cell; the face
/// normal used for stored velocities points from `lo` to `hi`.
#[derive(Debug, Clone, Copy)]
pub struct InteriorFace {
    pub lo: usize,
    pub hi: usize,
    pub axis: Axis,
    pub midpoint: (f64, f64),
}

/// A face of an active cell on the domain boundary.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryFace {
    pub cell: usize,
    pub outward: Outward,
    pub midpoint: (f64, f64),
}

/// Uniform cell-centered Cartesian grid over the bounding box of a union of
/// axis-aligned rectangles. Cells outside the union are inactive, which is how
/// L-shaped domains are represented.
#[derive(Debug, Clone)]
pub struct Grid {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    x0: f64,
    y0: f64,
    active: Vec<bool>,
    compact_of_dense: Vec<Option<usize>>,
    cells: Vec<(usize, usize)>,
    interior_faces: Vec<InteriorFace>,
    boundary_faces: Vec<BoundaryFace>,
}

const ALIGN_TOL: f64 = 1e-9;

fn aligned(coord: f64, origin: f64, h: f64) -> Result<usize> {
    let t = (coord - origin) / h;
    let r = t.round();
    if (t - r).abs() > ALIGN_TOL * t.abs().max(1.0) {
        return Err(Error::InvalidDomain(format!(
            "coordinate {coord} does not align with the grid lattice (spacing {h})"
        )));
    }
    Ok(r as usize)
}

impl Grid {
    /// Build the grid for the union of `rects`, with `nx` x `ny` cells across
    /// the bounding box. Every rectangle corner must land on the cell lattice.
    pub fn build(rects: &[Rect], nx: usize, ny: usize) -> Result<Grid> {
        if rects.is_empty() {
            return Err(Error::InvalidDomain("domain has no rectangles".into()));
        }
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidDomain(format!(
                "grid must be at least 2x2 cells, got {nx}x{ny}"
            )));
        }
        for r in rects {
            if r.x[1] <= r.x[0] || r.y[1] <= r.y[0] {
                return Err(Error::InvalidDomain(format!(
                    "rectangle [{},{}]x[{},{}] has non-positive area",
                    r.x[0], r.x[1], r.y[0], r.y[1]
                )));
            }
        }
        let x0 = rects.iter().map(|r| r.x[0]).fold(f64::INFINITY, f64::min);
        let x1 = rects.iter().map(|r| r.x[1]).fold(f64::NEG_INFINITY, f64::max);
        let y0 = rects.iter().map(|r| r.y[0]).fold(f64::INFINITY, f64::min);
        let y1 = rects.iter().map(|r| r.y[1]).fold(f64::NEG_INFINITY, f64::max);
        let hx = (x1 - x0) / nx as f64;
        let hy = (y1 - y0) / ny as f64;
        for r in rects {
            aligned(r.x[0], x0, hx)?;
            aligned(r.x[1], x0, hx)?;
            aligned(r.y[0], y0, hy)?;
            aligned(r.y[1], y0, hy)?;
        }

        let mut active = vec![false; nx * ny];
        for j in 0..ny {
            for i in 0..nx {
                let (xc, yc) = (x0 + (i as f64 + 0.5) * hx, y0 + (j as f64 + 0.5) * hy);
                if rects.iter().any(|r| r.contains(xc, yc)) {
                    active[j * nx + i] = true;
                }
            }
        }
        if !active.iter().any(|a| *a) {
            return Err(Error::InvalidDomain("domain contains no active cells".into()));
        }

        let mut compact_of_dense = vec![None; nx * ny];
        let mut cells = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                if active[j * nx + i] {
                    compact_of_dense[j * nx + i] = Some(cells.len());
                    cells.push((i, j));
                }
            }
        }

        let mut grid = Grid {
            nx,
            ny,
            hx,
            hy,
            x0,
            y0,
            active,
            compact_of_dense,
            cells,
            interior_faces: Vec::new(),
            boundary_faces: Vec::new(),
        };
        grid.enumerate_faces();
        grid.check_connected()?;
        Ok(grid)
    }

    fn enumerate_faces(&mut self) {
        let mut interior = Vec::new();
        let mut boundary = Vec::new();
        for (c, &(i, j)) in self.cells.iter().enumerate() {
            let (xc, yc) = self.cell_center(c);
            // East/north faces become interior faces once; west/south only at the boundary.
            match self.neighbor(i, j, 1, 0) {
                Some(nb) => interior.push(InteriorFace {
                    lo: c,
                    hi: nb,
                    axis: Axis::X,
                    midpoint: (xc + 0.5 * self.hx, yc),
                }),
                None => boundary.push(BoundaryFace {
                    cell: c,
                    outward: Outward::East,
                    midpoint: (xc + 0.5 * self.hx, yc),
                }),
            }
            if self.neighbor(i, j, -1, 0).is_none() {
                boundary.push(BoundaryFace {
                    cell: c,
                    outward: Outward::West,
                    midpoint: (xc - 0.5 * self.hx, yc),
                });
            }
            match self.neighbor(i, j, 0, 1) {
                Some(nb) => interior.push(InteriorFace {
                    lo: c,
                    hi: nb,
                    axis: Axis::Y,
                    midpoint: (xc, yc + 0.5 * self.hy),
                }),
                None => boundary.push(BoundaryFace {
                    cell: c,
                    outward: Outward::North,
                    midpoint: (xc, yc + 0.5 * self.hy),
                }),
            }
            if self.neighbor(i, j, 0, -1).is_none() {
                boundary.push(BoundaryFace {
                    cell: c,
                    outward: Outward::South,
                    midpoint: (xc, yc - 0.5 * self.hy),
                });
            }
        }
        self.interior_faces = interior;
        self.boundary_faces = boundary;
    }

    fn check_connected(&self) -> Result<()> {
        let n = self.n_cells();
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(c) = stack.pop() {
            let (i, j) = self.cells[c];
            for (di, dj) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                if let Some(nb) = self.neighbor(i, j, di, dj) {
                    if !seen[nb] {
                        seen[nb] = true;
                        count += 1;
                        stack.push(nb);
                    }
                }
            }
        }
        if count != n {
            return Err(Error::InvalidDomain(format!(
                "active region is not edge-connected ({count} of {n} cells reachable)"
            )));
        }
        Ok(())
    }

    fn neighbor(&self, i: usize, j: usize, di: i64, dj: i64) -> Option<usize> {
        let ni = i as i64 + di;
        let nj = j as i64 + dj;
        if ni < 0 || nj < 0 || ni >= self.nx as i64 || nj >= self.ny as i64 {
            return None;
        }
        self.compact_of_dense[nj as usize * self.nx + ni as usize]
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn hx(&self) -> f64 {
        self.hx
    }

    pub fn hy(&self) -> f64 {
        self.hy
    }

    pub fn origin(&self) -> (f64, f64) {
        (self.x0, self.y0)
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_volume(&self) -> f64 {
        self.hx * self.hy
    }

    pub fn total_area(&self) -> f64 {
        self.n_cells() as f64 * self.cell_volume()
    }

    /// Dense (i, j) index of a compact cell.
    pub fn cell_ij(&self, c: usize) -> (usize, usize) {
        self.cells[c]
    }

    pub fn cell_center(&self, c: usize) -> (f64, f64) {
        let (i, j) = self.cells[c];
        (
            self.x0 + (i as f64 + 0.5) * self.hx,
            self.y0 + (j as f64 + 0.5) * self.hy,
        )
    }

    /// Compact index of the active cell at dense (i, j), if any.
    pub fn compact_at(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.nx || j >= self.ny {
            return None;
        }
        self.compact_of_dense[j * self.nx + i]
    }

    pub fn is_active(&self, i: usize, j: usize) -> bool {
        i < self.nx && j < self.ny && self.active[j * self.nx + i]
    }

    pub fn interior_faces(&self) -> &[InteriorFace] {
        &self.interior_faces
    }

    pub fn boundary_faces(&self) -> &[BoundaryFace] {
        &self.boundary_faces
    }

    /// Face length perpendicular to the cell-center distance.
    pub fn face_length(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.hy,
            Axis::Y => self.hx,
        }
    }

    /// Distance between the cell centers straddling a face.
    pub fn face_distance(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.hx,
            Axis::Y => self.hy,
        }
    }

    /// Cell-volume-weighted inner product of two grid functions.
    pub fn inner_product(&self, a: &Field, b: &Field) -> f64 {
        debug_assert_eq!(a.len(), self.n_cells());
        debug_assert_eq!(b.len(), self.n_cells());
        self.cell_volume()
            * kahan_sum(a.values().iter().zip(b.values()).map(|(x, y)| x * y))
    }

    /// Midpoint-rule integral of a grid function over the active region.
    pub fn integral(&self, a: &Field) -> f64 {
        debug_assert_eq!(a.len(), self.n_cells());
        self.cell_volume() * kahan_sum(a.values().iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_counts() {
        let g = Grid::build(&[Rect::new(0.0, 1.0, 0.0, 1.0)], 10, 10).unwrap();
        assert_eq!(g.n_cells(), 100);
        assert_eq!(g.boundary_faces().len(), 40);
        assert_eq!(g.interior_faces().len(), 2 * 9 * 10);
        assert!((g.total_area() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn l_shape_active_area() {
        // Union of three rectangles forming the six-country channel; the
        // enclosed area is six 0.5 x 0.5 squares.
        let rects = [
            Rect::new(0.0, 1.0, 0.0, 0.5),
            Rect::new(0.5, 1.0, 0.0, 2.0),
            Rect::new(1.0, 1.5, 1.5, 2.0),
        ];
        let g = Grid::build(&rects, 30, 40).unwrap();
        assert!((g.hx() - 0.05).abs() < 1e-12);
        assert!((g.total_area() - 1.5).abs() < 1e-12);
    }

    #[test]
    fn misaligned_corner_rejected() {
        let err = Grid::build(
            &[Rect::new(0.0, 1.0, 0.0, 1.0), Rect::new(0.33, 1.0, 0.0, 1.0)],
            10,
            10,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidDomain(_)));
    }

    #[test]
    fn disconnected_domain_rejected() {
        let rects = [Rect::new(0.0, 0.2, 0.0, 1.0), Rect::new(0.8, 1.0, 0.0, 1.0)];
        let err = Grid::build(&rects, 10, 10).unwrap_err();
        assert!(matches!(err, Error::InvalidDomain(_)));
    }

    #[test]
    fn face_consistency() {
        // Every cell has exactly four faces: interior faces count twice,
        // boundary faces once.
        let rects = [
            Rect::new(0.0, 1.0, 0.0, 0.5),
            Rect::new(0.5, 1.0, 0.0, 2.0),
            Rect::new(1.0, 1.5, 1.5, 2.0),
        ];
        let g = Grid::build(&rects, 30, 40).unwrap();
        let mut touches = vec![0usize; g.n_cells()];
        for f in g.interior_faces() {
            touches[f.lo] += 1;
            touches[f.hi] += 1;
        }
        for f in g.boundary_faces() {
            touches[f.cell] += 1;
        }
        assert!(touches.iter().all(|&t| t == 4));
    }

    #[test]
    fn tiny_grid_rejected() {
        let err = Grid::build(&[Rect::new(0.0, 1.0, 0.0, 1.0)], 1, 10).unwrap_err();
        assert!(matches!(err, Error::InvalidDomain(_)));
    }
}
