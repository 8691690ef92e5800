use crate::field::Field;
use crate::geometry::grid::{Grid, Rect};

/// Half-plane predicate `a*x + b*y < c` (or `>= c` when `strict` is false,
/// i.e. the complement side).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HalfPlane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// true: keep `a*x + b*y < c`; false: keep `a*x + b*y >= c`.
    pub below: bool,
}

impl HalfPlane {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let s = self.a * x + self.b * y;
        if self.below {
            s < self.c
        } else {
            s >= self.c
        }
    }
}

/// One constant piece of a piecewise-constant velocity field. A point belongs
/// to the piece when it satisfies every listed predicate; a piece with no
/// predicates matches everywhere (catch-all).
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ConvectionPiece {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rect: Option<Rect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_plane: Option<HalfPlane>,
    pub value: [f64; 2],
}

impl ConvectionPiece {
    fn matches(&self, x: f64, y: f64) -> bool {
        self.rect.map_or(true, |r| r.contains(x, y))
            && self.half_plane.map_or(true, |h| h.contains(x, y))
    }
}

/// Piecewise-constant convective field b(x). Evaluation takes the first piece
/// in list order that matches, so ties on piece boundaries are deterministic.
/// The field must be total: the last piece acts as the default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvectionField {
    pieces: Vec<ConvectionPiece>,
}

impl ConvectionField {
    /// The zero field (no convection).
    pub fn none() -> Self {
        ConvectionField { pieces: Vec::new() }
    }

    pub fn new(pieces: Vec<ConvectionPiece>) -> Self {
        ConvectionField { pieces }
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty() || self.pieces.iter().all(|p| p.value == [0.0, 0.0])
    }

    pub fn pieces(&self) -> &[ConvectionPiece] {
        &self.pieces
    }

    /// First-match evaluation; missing default piece evaluates to zero.
    pub fn at(&self, x: f64, y: f64) -> [f64; 2] {
        for p in &self.pieces {
            if p.matches(x, y) {
                return p.value;
            }
        }
        [0.0, 0.0]
    }
}

/// Face-sampled velocities and the per-cell discrete divergence report.
#[derive(Debug, Clone)]
pub struct SampledConvection {
    /// b . n at interior face midpoints, normal pointing lo -> hi.
    pub interior: Vec<f64>,
    /// b . n at boundary face midpoints, outward normal.
    pub boundary: Vec<f64>,
    /// Per-cell discrete divergence (1/vol) sum of face-normal fluxes.
    pub divergence: Field,
    /// Compact indices of cells with nonzero discrete divergence.
    pub flagged_cells: Vec<usize>,
}

impl SampledConvection {
    pub fn max_divergence(&self) -> f64 {
        self.divergence.norm_inf()
    }
}

/// Sample a convective field at every face midpoint and report the discrete
/// divergence of the sampled fluxes.
pub fn sample_convection(field: &ConvectionField, grid: &Grid) -> SampledConvection {
    let mut interior = Vec::with_capacity(grid.interior_faces().len());
    let mut div = vec![0.0; grid.n_cells()];
    let vol = grid.cell_volume();
    for face in grid.interior_faces() {
        let (x, y) = face.midpoint;
        let b = field.at(x, y);
        let w = match face.axis {
            crate::geometry::grid::Axis::X => b[0],
            crate::geometry::grid::Axis::Y => b[1],
        };
        interior.push(w);
        let flux = w * grid.face_length(face.axis);
        div[face.lo] += flux / vol;
        div[face.hi] -= flux / vol;
    }
    let mut boundary = Vec::with_capacity(grid.boundary_faces().len());
    for face in grid.boundary_faces() {
        let (x, y) = face.midpoint;
        let b = field.at(x, y);
        let n = face.outward.normal();
        let w = b[0] * n.0 + b[1] * n.1;
        boundary.push(w);
        div[face.cell] += w * grid.face_length(face.outward.axis()) / vol;
    }
    let divergence = Field::from_vec(div);
    let flagged_cells = divergence
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &d)| d != 0.0)
        .map(|(c, _)| c)
        .collect();
    SampledConvection { interior, boundary, divergence, flagged_cells }
}
