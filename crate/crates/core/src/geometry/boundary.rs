use crate::error::{Error, Result};
use crate::geometry::grid::{Axis, Grid};

/// Which operator the boundary coefficients describe. With `Primal`, the
/// spec is the Robin condition `alpha*P + k grad(P).n = 0` of the state
/// equation and the adjoint operator is the matrix transpose. With `Adjoint`,
/// the spec gives the adjoint-side condition
/// `grad(v).n + ((alpha - b.n)/k) v = 0` (the duality partner of the primal
/// Robin condition when `b.n != 0` on the boundary) and the primal operator is
/// taken as the transpose of the directly assembled adjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcSide {
    Primal,
    Adjoint,
}

/// A straight boundary segment `axis = at` (e.g. `x = 0`).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SegmentLocus {
    pub axis: AxisName,
    pub at: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AxisName {
    X,
    Y,
}

/// Robin weight on one boundary segment.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SegmentRule {
    pub on: SegmentLocus,
    pub alpha: f64,
}

/// Exchange coefficients on the domain boundary. Segment rules are matched
/// first (in list order); unmatched faces use `default_alpha`. The boundary
/// data P_b is identically zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundarySpec {
    pub side: BcSide,
    pub default_alpha: f64,
    pub rules: Vec<SegmentRule>,
}

impl BoundarySpec {
    /// Insulated boundary everywhere (alpha = 0), primal side.
    pub fn insulated() -> Self {
        BoundarySpec { side: BcSide::Primal, default_alpha: 0.0, rules: Vec::new() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.default_alpha < 0.0 {
            return Err(Error::InvalidBoundary(format!(
                "alpha must be nonnegative, got {}",
                self.default_alpha
            )));
        }
        for rule in &self.rules {
            if rule.alpha < 0.0 {
                return Err(Error::InvalidBoundary(format!(
                    "alpha must be nonnegative, got {}",
                    rule.alpha
                )));
            }
        }
        Ok(())
    }

    /// Tag every boundary face with its segment (rule index, or rules.len()
    /// for the default) and its alpha.
    pub fn resolve(&self, grid: &Grid) -> Result<ResolvedBc> {
        self.validate()?;
        let faces = grid.boundary_faces();
        let mut segment = Vec::with_capacity(faces.len());
        let mut alpha = Vec::with_capacity(faces.len());
        let tol = 1e-9 * grid.hx().max(grid.hy()).max(1.0);
        for face in faces {
            let mut tag = self.rules.len();
            for (r, rule) in self.rules.iter().enumerate() {
                let face_axis = face.outward.axis();
                let matches = match rule.on.axis {
                    AxisName::X => {
                        face_axis == Axis::X && (face.midpoint.0 - rule.on.at).abs() <= tol
                    }
                    AxisName::Y => {
                        face_axis == Axis::Y && (face.midpoint.1 - rule.on.at).abs() <= tol
                    }
                };
                if matches {
                    tag = r;
                    break;
                }
            }
            segment.push(tag);
            alpha.push(if tag == self.rules.len() { self.default_alpha } else { self.rules[tag].alpha });
        }
        for (r, rule) in self.rules.iter().enumerate() {
            if !segment.contains(&r) {
                return Err(Error::InvalidBoundary(format!(
                    "boundary rule {} ({:?} = {}) matches no boundary face",
                    r + 1,
                    rule.on.axis,
                    rule.on.at
                )));
            }
        }
        Ok(ResolvedBc { side: self.side, segment, alpha })
    }
}

/// Per-face boundary coefficients, aligned with `grid.boundary_faces()`.
#[derive(Debug, Clone)]
pub struct ResolvedBc {
    pub side: BcSide,
    pub segment: Vec<usize>,
    pub alpha: Vec<f64>,
}
