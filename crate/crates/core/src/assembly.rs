//! Finite-volume assembly of the generator
//!
//! ```text
//! A P = div(k grad P) + b . grad P - c P
//! ```
//!
//! over the active cells of a grid, with the boundary condition folded into
//! the matrix (P_b = 0, so there is no affine boundary term).
//!
//! Diffusion uses central two-point fluxes with harmonic face averaging of k.
//! The convection term `+ b . grad P` equals `+ div(b P)` for divergence-free
//! b and is discretized in flux form with first-order upwinding; the
//! transporting velocity of this term is `-b`, so the upwind side of a face is
//! the cell the flow `-b` comes from. Upwinding keeps the matrix an M-matrix
//! (positive off-diagonals, negative diagonal), which is what makes the
//! adjoint solutions sign-definite downstream.
//!
//! The discrete adjoint is the plain matrix transpose (exact under the
//! cell-volume-weighted inner product on a uniform grid). When a scenario
//! prescribes the adjoint-side boundary conditions instead (open boundaries
//! crossed by the convective field), `assemble_adjoint_direct` discretizes
//!
//! ```text
//! A* v = div(k grad v) - b . grad v - c v,
//! grad(v).n + ((alpha - b.n)/k) v = 0 on the boundary,
//! ```
//!
//! and the primal operator is then the transpose of that matrix.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{BcSide, Grid, RegionPartition, ResolvedBc, SampledConvection};
use crate::sparse::CsrMatrix;

/// Spatially varying or constant coefficient.
#[derive(Debug, Clone, PartialEq)]
pub enum Coef {
    Constant(f64),
    PerCell(Vec<f64>),
}

impl Coef {
    pub fn at(&self, cell: usize) -> f64 {
        match self {
            Coef::Constant(v) => *v,
            Coef::PerCell(v) => v[cell],
        }
    }

    fn min(&self) -> f64 {
        match self {
            Coef::Constant(v) => *v,
            Coef::PerCell(v) => v.iter().fold(f64::INFINITY, |m, &x| m.min(x)),
        }
    }
}

/// Physical coefficients of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients {
    /// Diffusion k > 0.
    pub k: Coef,
    /// Natural decay rate c >= 0.
    pub c: Coef,
    /// Discount rate rho > 0.
    pub rho: f64,
    /// Per-player damage coefficient phi_i > 0.
    pub phi: Vec<f64>,
}

impl Coefficients {
    pub fn validate(&self, n_cells: usize, players: usize) -> Result<()> {
        if self.k.min() <= 0.0 {
            return Err(Error::InvalidCoefficients("k must be positive".into()));
        }
        if self.c.min() < 0.0 {
            return Err(Error::InvalidCoefficients("c must be nonnegative".into()));
        }
        if self.rho <= 0.0 {
            return Err(Error::InvalidCoefficients("rho must be positive".into()));
        }
        if self.phi.len() != players {
            return Err(Error::InvalidCoefficients(format!(
                "expected {} phi values, got {}",
                players,
                self.phi.len()
            )));
        }
        if self.phi.iter().any(|&p| p <= 0.0) {
            return Err(Error::InvalidCoefficients("phi must be positive".into()));
        }
        for coef in [&self.k, &self.c] {
            if let Coef::PerCell(v) = coef {
                if v.len() != n_cells {
                    return Err(Error::InvalidCoefficients(format!(
                        "per-cell coefficient has {} entries for {} cells",
                        v.len(),
                        n_cells
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Primal,
    Adjoint,
}

/// Assembled generator with its boundary conditions baked in.
#[derive(Debug, Clone)]
pub struct SparseOperator {
    pub matrix: CsrMatrix,
    pub kind: OperatorKind,
    /// Which side's boundary conditions were assembled directly.
    pub assembled_side: BcSide,
    /// Affine boundary contribution; identically zero because P_b = 0.
    pub boundary_load: Field,
}

impl SparseOperator {
    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    /// apply the operator: out = A p
    pub fn apply(&self, p: &Field) -> Field {
        Field::from_vec(self.matrix.matvec_alloc(p.values()))
    }
}

fn harmonic(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

/// Eliminated Robin flux coefficient: the boundary face removes
/// `coeff * value_at_cell` per unit face length. `w` is b.n at the face
/// (zero on the primal side, where the condition carries no convective term).
fn eliminated_robin(alpha: f64, w: f64, k: f64, h: f64) -> Result<f64> {
    let denom = 1.0 + (alpha - w) * h / (2.0 * k);
    if denom <= 0.05 {
        return Err(Error::InvalidBoundary(format!(
            "boundary elimination is ill-posed: 1 + (alpha - b.n) h / (2k) = {denom:.3e}"
        )));
    }
    Ok(alpha / denom)
}

/// Discretize `A P = div(k grad P) + b . grad P - c P` with the primal Robin
/// condition `alpha P + k grad(P).n = 0`.
pub fn assemble_primal(
    grid: &Grid,
    coeff: &Coefficients,
    conv: &SampledConvection,
    bc: &ResolvedBc,
) -> Result<SparseOperator> {
    if bc.side != BcSide::Primal {
        return Err(Error::InvalidBoundary(
            "assemble_primal needs primal-side boundary conditions".into(),
        ));
    }
    let n = grid.n_cells();
    let vol = grid.cell_volume();
    let mut trip: Vec<(usize, usize, f64)> = Vec::with_capacity(5 * n);

    for (f, face) in grid.interior_faces().iter().enumerate() {
        let area = grid.face_length(face.axis);
        let dist = grid.face_distance(face.axis);
        let kf = harmonic(coeff.k.at(face.lo), coeff.k.at(face.hi));
        let t = kf * area / (dist * vol);
        trip.push((face.lo, face.hi, t));
        trip.push((face.lo, face.lo, -t));
        trip.push((face.hi, face.lo, t));
        trip.push((face.hi, face.hi, -t));

        let w = conv.interior[f];
        if w != 0.0 {
            let q = w * area / vol;
            if w > 0.0 {
                // Transport -b runs hi -> lo; the face value is P_hi.
                trip.push((face.lo, face.hi, q));
                trip.push((face.hi, face.hi, -q));
            } else {
                trip.push((face.lo, face.lo, q));
                trip.push((face.hi, face.lo, -q));
            }
        }
    }

    for (f, face) in grid.boundary_faces().iter().enumerate() {
        let area = grid.face_length(face.outward.axis());
        let h = grid.face_distance(face.outward.axis());
        let kc = coeff.k.at(face.cell);
        let alpha = bc.alpha[f];
        if alpha > 0.0 {
            let robin = eliminated_robin(alpha, 0.0, kc, h)?;
            trip.push((face.cell, face.cell, -robin * area / vol));
        }
        let w = conv.boundary[f];
        if w < 0.0 {
            // b.n < 0 is outflow of the transport -b; upwind is the cell value.
            trip.push((face.cell, face.cell, w * area / vol));
        }
        // b.n > 0 carries exterior stock P_b = 0 into the cell: no matrix term.
    }

    for c in 0..n {
        let decay = coeff.c.at(c);
        if decay != 0.0 {
            trip.push((c, c, -decay));
        }
    }

    Ok(SparseOperator {
        matrix: CsrMatrix::from_triplets(n, &trip),
        kind: OperatorKind::Primal,
        assembled_side: BcSide::Primal,
        boundary_load: Field::zeros(n),
    })
}

/// The discrete adjoint of an assembled operator: the matrix transpose, which
/// satisfies `<A p, v>_h = <p, A* v>_h` exactly on a uniform grid.
pub fn assemble_adjoint(op: &SparseOperator) -> SparseOperator {
    SparseOperator {
        matrix: op.matrix.transpose(),
        kind: match op.kind {
            OperatorKind::Primal => OperatorKind::Adjoint,
            OperatorKind::Adjoint => OperatorKind::Primal,
        },
        assembled_side: op.assembled_side,
        boundary_load: Field::zeros(op.n()),
    }
}

/// Discretize `A* v = div(k grad v) - b . grad v - c v` with the adjoint-side
/// condition `grad(v).n + ((alpha - b.n)/k) v = 0` given per boundary segment.
/// Scenarios that prescribe adjoint conditions take the primal operator as the
/// transpose of this matrix.
pub fn assemble_adjoint_direct(
    grid: &Grid,
    coeff: &Coefficients,
    conv: &SampledConvection,
    bc: &ResolvedBc,
) -> Result<SparseOperator> {
    if bc.side != BcSide::Adjoint {
        return Err(Error::InvalidBoundary(
            "assemble_adjoint_direct needs adjoint-side boundary conditions".into(),
        ));
    }
    let n = grid.n_cells();
    let vol = grid.cell_volume();
    let mut trip: Vec<(usize, usize, f64)> = Vec::with_capacity(5 * n);

    for (f, face) in grid.interior_faces().iter().enumerate() {
        let area = grid.face_length(face.axis);
        let dist = grid.face_distance(face.axis);
        let kf = harmonic(coeff.k.at(face.lo), coeff.k.at(face.hi));
        let t = kf * area / (dist * vol);
        trip.push((face.lo, face.hi, t));
        trip.push((face.lo, face.lo, -t));
        trip.push((face.hi, face.lo, t));
        trip.push((face.hi, face.hi, -t));

        let w = conv.interior[f];
        if w != 0.0 {
            let q = w * area / vol;
            if w > 0.0 {
                // -div(b v): transport +b runs lo -> hi; the face value is v_lo.
                trip.push((face.lo, face.lo, -q));
                trip.push((face.hi, face.lo, q));
            } else {
                trip.push((face.lo, face.hi, -q));
                trip.push((face.hi, face.hi, q));
            }
        }
    }

    for (f, face) in grid.boundary_faces().iter().enumerate() {
        let area = grid.face_length(face.outward.axis());
        let h = grid.face_distance(face.outward.axis());
        let kc = coeff.k.at(face.cell);
        let alpha = bc.alpha[f];
        let w = conv.boundary[f];
        // Total boundary flux (diffusive plus convective) eliminated with the
        // one-sided boundary condition: -alpha * v_face per unit length.
        let robin = eliminated_robin(alpha, w, kc, h)?;
        if robin != 0.0 {
            trip.push((face.cell, face.cell, -robin * area / vol));
        }
    }

    for c in 0..n {
        let decay = coeff.c.at(c);
        if decay != 0.0 {
            trip.push((c, c, -decay));
        }
    }

    Ok(SparseOperator {
        matrix: CsrMatrix::from_triplets(n, &trip),
        kind: OperatorKind::Adjoint,
        assembled_side: BcSide::Adjoint,
        boundary_load: Field::zeros(n),
    })
}

/// Right-hand side `phi_i * 1_{Omega_i}` of a player's adjoint problem.
pub fn indicator_load(partition: &RegionPartition, player: usize, phi_i: f64) -> Field {
    let n: usize = (0..partition.players()).map(|r| partition.cells_of(r).len()).sum();
    let mut load = Field::zeros(n);
    for &c in partition.cells_of(player) {
        load[c] = phi_i;
    }
    load
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::kahan_sum;
    use crate::geometry::{
        sample_convection, AxisName, BoundarySpec, ConvectionField, ConvectionPiece, Rect,
        SegmentLocus, SegmentRule,
    };
    use rand::{Rng, SeedableRng};

    fn square(n: usize) -> Grid {
        Grid::build(&[Rect::new(0.0, 1.0, 0.0, 1.0)], n, n).unwrap()
    }

    fn constant_coeff(c: f64) -> Coefficients {
        Coefficients { k: Coef::Constant(1.0), c: Coef::Constant(c), rho: 0.01, phi: vec![1.0] }
    }

    fn uniform_b(bx: f64, by: f64) -> ConvectionField {
        ConvectionField::new(vec![ConvectionPiece { rect: None, half_plane: None, value: [bx, by] }])
    }

    #[test]
    fn constant_field_sees_only_decay() {
        let g = square(10);
        let conv = sample_convection(&ConvectionField::none(), &g);
        let bc = BoundarySpec::insulated().resolve(&g).unwrap();
        let op = assemble_primal(&g, &constant_coeff(0.5), &conv, &bc).unwrap();
        let one = Field::constant(g.n_cells(), 1.0);
        let out = op.apply(&one);
        for c in 0..g.n_cells() {
            assert!((out[c] + 0.5).abs() < 1e-12, "cell {c}: {}", out[c]);
        }
    }

    #[test]
    fn pure_neumann_row_sums_are_exactly_zero() {
        // h = 0.125 keeps every transmissibility a power of two, so the
        // cancellation is bitwise; other spacings cancel to rounding.
        let g = square(8);
        let conv = sample_convection(&ConvectionField::none(), &g);
        let bc = BoundarySpec::insulated().resolve(&g).unwrap();
        let op = assemble_primal(&g, &constant_coeff(0.0), &conv, &bc).unwrap();
        let one = Field::constant(g.n_cells(), 1.0);
        let out = op.apply(&one);
        for c in 0..g.n_cells() {
            assert_eq!(out[c], 0.0, "row {c} sum {}", out[c]);
        }

        let g = square(10);
        let conv = sample_convection(&ConvectionField::none(), &g);
        let bc = BoundarySpec::insulated().resolve(&g).unwrap();
        let op = assemble_primal(&g, &constant_coeff(0.0), &conv, &bc).unwrap();
        let out = op.apply(&Field::constant(g.n_cells(), 1.0));
        assert!(out.norm_inf() < 1e-11, "row sums {}", out.norm_inf());
    }

    #[test]
    fn robin_boundary_row_matches_hand_assembly() {
        // alpha = 1 on the x = 0 edge of the unit square, h = 0.1. The west
        // boundary cell row gains the eliminated Robin flux on the diagonal.
        let g = square(10);
        let conv = sample_convection(&ConvectionField::none(), &g);
        let spec = BoundarySpec {
            side: BcSide::Primal,
            default_alpha: 0.0,
            rules: vec![SegmentRule { on: SegmentLocus { axis: AxisName::X, at: 0.0 }, alpha: 1.0 }],
        };
        let bc = spec.resolve(&g).unwrap();
        let op = assemble_primal(&g, &constant_coeff(0.5), &conv, &bc).unwrap();

        let h = 0.1;
        let t = 1.0 / (h * h);
        // Mid-edge cell (0, 5): three interior faces, one Robin face.
        let cell = g.compact_at(0, 5).unwrap();
        let robin = 1.0 / (1.0 + h / 2.0); // 2*k*alpha / (2*k + alpha*h)
        let expected_diag = -3.0 * t - robin / h - 0.5;
        let row: Vec<(usize, f64)> = op.matrix.row(cell).collect();
        let diag = row.iter().find(|(j, _)| *j == cell).unwrap().1;
        assert!((diag - expected_diag).abs() < 1e-9 * expected_diag.abs());
        // Interior cell for contrast: four faces, no Robin term.
        let interior = g.compact_at(5, 5).unwrap();
        let idiag = op.matrix.row(interior).find(|(j, _)| *j == interior).unwrap().1;
        assert!((idiag - (-4.0 * t - 0.5)).abs() < 1e-9 * idiag.abs());
    }

    #[test]
    fn transpose_satisfies_discrete_adjoint_identity() {
        let g = square(12);
        let conv = sample_convection(&uniform_b(4.0, -2.0), &g);
        let spec = BoundarySpec {
            side: BcSide::Primal,
            default_alpha: 0.5,
            rules: vec![],
        };
        let bc = spec.resolve(&g).unwrap();
        let op = assemble_primal(&g, &constant_coeff(0.5), &conv, &bc).unwrap();
        let adj = assemble_adjoint(&op);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = Field::from_vec((0..g.n_cells()).map(|_| rng.gen_range(-1.0..1.0)).collect());
            let v = Field::from_vec((0..g.n_cells()).map(|_| rng.gen_range(-1.0..1.0)).collect());
            let lhs = g.inner_product(&op.apply(&p), &v);
            let rhs = g.inner_product(&p, &adj.apply(&v));
            let scale = lhs.abs().max(rhs.abs()).max(1e-30);
            assert!((lhs - rhs).abs() / scale < 1e-13, "lhs {lhs} rhs {rhs}");
        }
    }

    #[test]
    fn self_adjoint_without_convection() {
        let g = square(8);
        let conv = sample_convection(&ConvectionField::none(), &g);
        let spec = BoundarySpec { side: BcSide::Primal, default_alpha: 1.0, rules: vec![] };
        let bc = spec.resolve(&g).unwrap();
        let op = assemble_primal(&g, &constant_coeff(0.5), &conv, &bc).unwrap();
        let adj = assemble_adjoint(&op);
        assert_eq!(op.matrix, adj.matrix);
    }

    #[test]
    fn direct_adjoint_collapses_to_transpose_without_convection() {
        // With b = 0 and k = 1 the adjoint-side condition grad(v).n + alpha v = 0
        // is the same Robin condition, so both assembly routes coincide.
        let g = square(8);
        let conv = sample_convection(&ConvectionField::none(), &g);
        let rules = vec![SegmentRule { on: SegmentLocus { axis: AxisName::X, at: 0.0 }, alpha: 1.0 }];
        let primal_bc = BoundarySpec {
            side: BcSide::Primal,
            default_alpha: 0.0,
            rules: rules.clone(),
        }
        .resolve(&g)
        .unwrap();
        let adjoint_bc = BoundarySpec { side: BcSide::Adjoint, default_alpha: 0.0, rules }
            .resolve(&g)
            .unwrap();
        let primal = assemble_primal(&g, &constant_coeff(0.5), &conv, &primal_bc).unwrap();
        let direct = assemble_adjoint_direct(&g, &constant_coeff(0.5), &conv, &adjoint_bc).unwrap();
        assert_eq!(assemble_adjoint(&primal).matrix, direct.matrix);
    }

    #[test]
    fn direct_adjoint_boundary_rows_hand_assembled() {
        // Uniform b = (4, 0) on the unit square, h = 0.1, k = 1, c = 0.5.
        let g = square(10);
        let h = 0.1;
        let t = 1.0 / (h * h);
        let conv = sample_convection(&uniform_b(4.0, 0.0), &g);
        let spec = BoundarySpec {
            side: BcSide::Adjoint,
            default_alpha: 0.0,
            rules: vec![SegmentRule { on: SegmentLocus { axis: AxisName::X, at: 0.0 }, alpha: 1.0 }],
        };
        let bc = spec.resolve(&g).unwrap();
        let adj = assemble_adjoint_direct(&g, &constant_coeff(0.5), &conv, &bc).unwrap();

        // East boundary cell (9, 5): b.n = 4 there, alpha = 0, so the total
        // boundary flux -(b.n) v + grad(v).n vanishes and the face drops out.
        // The row keeps the interior upwind outflow -4 v_i / h from its west
        // face... no: the west face of cell (9,5) is interior with w = 4 > 0,
        // upwind value v_lo = v_(8,5): off-diagonal, and the diagonal gets the
        // outflow only if this cell is the lo side of some face. East face is
        // boundary: contributes nothing.
        let cell = g.compact_at(9, 5).unwrap();
        let west = g.compact_at(8, 5).unwrap();
        let row: Vec<(usize, f64)> = adj.matrix.row(cell).collect();
        let diag = row.iter().find(|(j, _)| *j == cell).unwrap().1;
        let west_entry = row.iter().find(|(j, _)| *j == west).unwrap().1;
        // Hand assembly: diffusion 3 faces (west, north, south), convective
        // inflow from the west face (+4/h on the west neighbor), decay, and no
        // boundary term.
        assert!((diag - (-3.0 * t - 0.5)).abs() < 1e-9 * diag.abs(), "diag {diag}");
        assert!((west_entry - (t + 4.0 / h)).abs() < 1e-9 * west_entry.abs());

        // West boundary cell (0, 5): b.n = -4 and alpha = 1, so the eliminated
        // total flux is -alpha/(1 + (alpha - b.n) h / 2) v_i, and the east face
        // carries the upwind outflow -4/h on the diagonal.
        let cell = g.compact_at(0, 5).unwrap();
        let east = g.compact_at(1, 5).unwrap();
        let row: Vec<(usize, f64)> = adj.matrix.row(cell).collect();
        let diag = row.iter().find(|(j, _)| *j == cell).unwrap().1;
        let east_entry = row.iter().find(|(j, _)| *j == east).unwrap().1;
        let robin = 1.0 / (1.0 + (1.0 + 4.0) * h / 2.0);
        let expected = -3.0 * t - 4.0 / h - robin / h - 0.5;
        assert!((diag - expected).abs() < 1e-9 * diag.abs(), "diag {diag} vs {expected}");
        assert!((east_entry - t).abs() < 1e-12 * t, "east off-diagonal unchanged");
    }

    #[test]
    fn m_matrix_sign_structure() {
        let g = square(12);
        let conv = sample_convection(&uniform_b(4.0, 4.0), &g);
        let spec = BoundarySpec { side: BcSide::Primal, default_alpha: 1.0, rules: vec![] };
        let bc = spec.resolve(&g).unwrap();
        let op = assemble_primal(&g, &constant_coeff(0.5), &conv, &bc).unwrap();
        for i in 0..g.n_cells() {
            for (j, v) in op.matrix.row(i) {
                if i == j {
                    assert!(v < 0.0, "diagonal {i} is {v}");
                } else {
                    assert!(v >= 0.0, "off-diagonal ({i},{j}) is {v}");
                }
            }
        }
        assert!(op.matrix.max_row_nnz() <= 5);
    }

    #[test]
    fn upwind_fluxes_telescope() {
        // alpha = 0, c = 0: column sums reduce to boundary flux terms only.
        let g = square(10);
        let conv = sample_convection(&uniform_b(4.0, 0.0), &g);
        let bc = BoundarySpec::insulated().resolve(&g).unwrap();
        let op = assemble_primal(&g, &constant_coeff(0.0), &conv, &bc).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let p = Field::from_vec((0..g.n_cells()).map(|_| rng.gen_range(0.0..1.0)).collect());
        let total = g.integral(&op.apply(&p));
        // Independent boundary-flux sum: only outflow faces (b.n < 0) touch
        // the matrix; each removes w * p_cell * face_length.
        let mut expected = 0.0;
        for (f, face) in g.boundary_faces().iter().enumerate() {
            let w = conv.boundary[f];
            if w < 0.0 {
                expected += w * g.face_length(face.outward.axis()) * p[face.cell];
            }
        }
        assert!(
            (total - expected).abs() < 1e-9 * expected.abs().max(1.0),
            "total {total} vs boundary flux {expected}"
        );

        // And with b = 0 the sum vanishes outright.
        let conv0 = sample_convection(&ConvectionField::none(), &g);
        let op0 = assemble_primal(&g, &constant_coeff(0.0), &conv0, &bc).unwrap();
        let total0 = g.integral(&op0.apply(&p));
        assert!(total0.abs() < 1e-10, "conservation defect {total0:e}");
    }

    #[test]
    fn truncation_error_converges() {
        // Manufactured g = cos(pi x) cos(pi y): interior truncation error is
        // O(h^2) for pure diffusion and O(h) once upwinded convection enters.
        let f = |x: f64, y: f64| (std::f64::consts::PI * x).cos() * (std::f64::consts::PI * y).cos();
        let lap = |x: f64, y: f64| -2.0 * std::f64::consts::PI.powi(2) * f(x, y);
        let gx = |x: f64, y: f64| {
            -std::f64::consts::PI * (std::f64::consts::PI * x).sin() * (std::f64::consts::PI * y).cos()
        };

        let interior_error = |n: usize, bx: f64| -> f64 {
            let g = square(n);
            let conv = sample_convection(&uniform_b(bx, 0.0), &g);
            let bc = BoundarySpec::insulated().resolve(&g).unwrap();
            let op = assemble_primal(&g, &constant_coeff(0.0), &conv, &bc).unwrap();
            let samples =
                Field::from_vec((0..g.n_cells()).map(|c| {
                    let (x, y) = g.cell_center(c);
                    f(x, y)
                }).collect());
            let out = op.apply(&samples);
            let mut err: f64 = 0.0;
            for c in 0..g.n_cells() {
                let (i, j) = g.cell_ij(c);
                if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
                    continue;
                }
                let (x, y) = g.cell_center(c);
                let exact = lap(x, y) + bx * gx(x, y);
                err = err.max((out[c] - exact).abs());
            }
            err
        };

        // Pure diffusion: second order.
        let e1 = interior_error(16, 0.0);
        let e2 = interior_error(32, 0.0);
        let rate = (e1 / e2).log2();
        assert!(rate > 1.8, "diffusion rate {rate}");

        // With convection: first order once the upwind term dominates.
        let e1 = interior_error(32, 4.0);
        let e2 = interior_error(64, 4.0);
        let rate = (e1 / e2).log2();
        assert!(rate > 0.9, "upwind rate {rate}");
    }

    #[test]
    fn indicator_load_basics() {
        let g = square(10);
        let p = RegionPartition::build(
            &g,
            &[
                vec![Rect::new(0.0, 0.5, 0.0, 1.0)],
                vec![Rect::new(0.5, 1.0, 0.0, 1.0)],
            ],
        )
        .unwrap();
        let load = indicator_load(&p, 0, 1.0);
        for c in 0..g.n_cells() {
            let (x, _) = g.cell_center(c);
            assert_eq!(load[c], if x < 0.5 { 1.0 } else { 0.0 });
        }
        // Integral of the load equals phi_i * m_i.
        let total = g.cell_volume() * kahan_sum(load.values().iter().copied());
        assert!((total - 0.5).abs() < 1e-12);

        let whole = RegionPartition::build(&g, &[vec![Rect::new(0.0, 1.0, 0.0, 1.0)]]).unwrap();
        let load = indicator_load(&whole, 0, 1.0);
        assert!(load.values().iter().all(|&v| v == 1.0));
    }
}
