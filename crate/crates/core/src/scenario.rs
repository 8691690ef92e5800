//! Scenario files: a TOML document describing the domain, the players'
//! regions, coefficients, boundary segments, the convective field, simulation
//! parameters and the qualitative checks that `verify` runs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::assembly::{
    assemble_adjoint, assemble_adjoint_direct, assemble_primal, Coef, Coefficients, SparseOperator,
};
use crate::equilibrium::{solve_equilibrium, EquilibriumSolution};
use crate::error::{Error, Result};
use crate::geometry::{
    sample_convection, AxisName, BcSide, BoundarySpec, ConvectionField, ConvectionPiece, Grid,
    Rect, RegionPartition, ResolvedBc, SampledConvection, SegmentLocus, SegmentRule,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Uniform cell size; nx, ny are derived from the bounding box.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nx: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ny: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub rects: Vec<Rect>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSpec {
    pub k: f64,
    pub c: f64,
    pub rho: f64,
    pub phi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySegmentSpec {
    pub axis: AxisName,
    pub at: f64,
    pub alpha: f64,
}

fn default_side() -> BcSide {
    BcSide::Primal
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySpecFile {
    /// Which operator these conditions describe; `adjoint` means the adjoint
    /// problem is assembled directly and the primal is its transpose.
    #[serde(default = "default_side")]
    pub side: BcSide,
    /// Exchange coefficient on segments not listed below.
    #[serde(default)]
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub segments: Vec<BoundarySegmentSpec>,
}

impl Default for BoundarySpecFile {
    fn default() -> Self {
        BoundarySpecFile { side: BcSide::Primal, alpha: 0.0, segments: Vec::new() }
    }
}

fn default_horizon() -> f64 {
    200.0
}

fn default_dt() -> f64 {
    0.01
}

fn default_scales() -> Vec<f64> {
    vec![0.5, 0.9, 1.1, 2.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Store a full stock snapshot every this many steps (0 = final only).
    #[serde(default)]
    pub snapshot_every: usize,
    #[serde(default = "default_scales")]
    pub deviation_scales: Vec<f64>,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        SimulationSpec {
            horizon: default_horizon(),
            dt: default_dt(),
            snapshot_every: 0,
            deviation_scales: default_scales(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    Emissions,
    Stock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Greater,
    Less,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MirrorKind {
    X,
    Y,
    Point,
}

fn default_tol_mirror() -> f64 {
    1e-9
}

fn default_quarter() -> f64 {
    0.25
}

fn default_payoff_tol() -> f64 {
    0.01
}

fn default_settle() -> f64 {
    1.0
}

fn default_bound_fraction() -> f64 {
    0.2
}

/// One declared qualitative check; player indices are 1-based in files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    /// || u_a - mirror(u_b) ||_inf <= tol under a reflection of the domain.
    MirrorU {
        axis: MirrorKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        at: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 2]>,
        player_a: usize,
        player_b: usize,
        #[serde(default = "default_tol_mirror")]
        tol: f64,
    },
    /// Emissions strictly increase toward the line `axis = at` along every
    /// grid line of the player's region.
    EmissionsIncreaseToward { player: usize, axis: AxisName, at: f64 },
    /// Region means strictly decrease from each group to the next.
    RegionMeanOrder { field: FieldKind, groups: Vec<Vec<usize>> },
    /// Emissions of `player` on its side of the interface with `neighbor`
    /// strictly decrease with distance from region `from`.
    InterfaceDecay { player: usize, neighbor: usize, from: usize },
    /// The emission argmax of `player` sits on cells touching the boundary
    /// segment `axis = at`.
    ArgmaxOnBoundary { player: usize, axis: AxisName, at: f64 },
    /// The emission argmax of `player` lies within `fraction` of its region
    /// extent from the interface with `neighbor`.
    ArgmaxNearInterface {
        player: usize,
        neighbor: usize,
        #[serde(default = "default_quarter")]
        fraction: f64,
    },
    /// Compare two regions' means of a field.
    RegionMeanCompare { field: FieldKind, player_a: usize, player_b: usize, relation: Relation },
    /// Mean stock on cells touching the boundary segment is below the domain mean.
    StockLowNearBoundary { axis: AxisName, at: f64 },
    /// Simulated unilateral deviations pay strictly less than equilibrium.
    NashDeviation {
        players: Vec<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scales: Option<Vec<f64>>,
    },
    /// |J_sim(P0) - V(P0)| / |V(P0)| <= tol for P0 = 0 and P0 = P_ss.
    PayoffMatchesValue {
        players: Vec<usize>,
        #[serde(default = "default_payoff_tol")]
        tol: f64,
    },
    /// e^{-rho t} |V(P(t))| decreases past `settle` and ends below
    /// `bound_fraction * |V(P0)|` on the equilibrium trajectory from P0 = 0.
    Transversality {
        players: Vec<usize>,
        #[serde(default = "default_settle")]
        settle: f64,
        #[serde(default = "default_bound_fraction")]
        bound_fraction: f64,
    },
    /// Compare domain means against another scenario file (path relative to
    /// this scenario's directory).
    CompareScenario {
        path: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        emissions: Option<Relation>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        stock: Option<Relation>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub grid: GridSpec,
    pub domain: Vec<Rect>,
    #[serde(rename = "region")]
    pub regions: Vec<RegionSpec>,
    pub coefficients: CoefficientSpec,
    #[serde(default)]
    pub boundary: BoundarySpecFile,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub convection: Vec<ConvectionPieceSpec>,
    #[serde(default)]
    pub simulation: SimulationSpec,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<CheckSpec>,
    /// Directory of the file this scenario was parsed from; used to resolve
    /// cross-scenario checks.
    #[serde(skip)]
    pub base_dir: Option<PathBuf>,
}

/// Serialized form of one convection piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvectionPieceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rect: Option<Rect>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_plane: Option<crate::geometry::HalfPlane>,
    pub value: [f64; 2],
}

impl Scenario {
    pub fn parse_str(text: &str) -> Result<Scenario> {
        let scenario: Scenario =
            toml::from_str(text).map_err(|e| Error::Scenario(format!("parse error: {e}")))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Scenario(format!("cannot read {}: {e}", path.display())))?;
        let mut scenario = Scenario::parse_str(&text)
            .map_err(|e| Error::Scenario(format!("{}: {e}", path.display())))?;
        scenario.base_dir = path.parent().map(Path::to_path_buf);
        Ok(scenario)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Scenario(format!("serialize: {e}")))
    }

    pub fn players(&self) -> usize {
        self.regions.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.regions.is_empty() {
            return Err(Error::Scenario("scenario defines no regions".into()));
        }
        let c = &self.coefficients;
        if c.k <= 0.0 {
            return Err(Error::Scenario("k must be positive".into()));
        }
        if c.c < 0.0 {
            return Err(Error::Scenario("c must be nonnegative".into()));
        }
        if c.rho <= 0.0 {
            return Err(Error::Scenario("rho must be positive".into()));
        }
        if c.phi.len() != self.regions.len() {
            return Err(Error::Scenario(format!(
                "phi has {} entries for {} regions",
                c.phi.len(),
                self.regions.len()
            )));
        }
        if c.phi.iter().any(|&p| p <= 0.0) {
            return Err(Error::Scenario("phi must be positive".into()));
        }
        if self.boundary.alpha < 0.0 || self.boundary.segments.iter().any(|s| s.alpha < 0.0) {
            return Err(Error::Scenario("alpha must be nonnegative".into()));
        }
        match (self.grid.h, self.grid.nx, self.grid.ny) {
            (Some(h), None, None) if h > 0.0 => {}
            (None, Some(nx), Some(ny)) if nx >= 2 && ny >= 2 => {}
            _ => {
                return Err(Error::Scenario(
                    "grid needs either a positive h or both nx >= 2 and ny >= 2".into(),
                ))
            }
        }
        if self.simulation.dt <= 0.0 || self.simulation.horizon < self.simulation.dt {
            return Err(Error::Scenario("simulation needs 0 < dt <= horizon".into()));
        }
        if self.simulation.deviation_scales.iter().any(|&s| s <= 0.0) {
            return Err(Error::Scenario("deviation scales must be positive".into()));
        }
        let players = self.regions.len();
        let check_player = |p: usize| -> Result<()> {
            if p == 0 || p > players {
                return Err(Error::Scenario(format!(
                    "check references player {p}, but the scenario has {players}"
                )));
            }
            Ok(())
        };
        for check in &self.checks {
            match check {
                CheckSpec::MirrorU { player_a, player_b, axis, at, center, tol } => {
                    check_player(*player_a)?;
                    check_player(*player_b)?;
                    if *tol <= 0.0 {
                        return Err(Error::Scenario("mirror tolerance must be positive".into()));
                    }
                    match axis {
                        MirrorKind::Point if center.is_none() => {
                            return Err(Error::Scenario(
                                "point mirror check needs a center".into(),
                            ))
                        }
                        MirrorKind::X | MirrorKind::Y if at.is_none() => {
                            return Err(Error::Scenario("axis mirror check needs `at`".into()))
                        }
                        _ => {}
                    }
                }
                CheckSpec::EmissionsIncreaseToward { player, .. } => check_player(*player)?,
                CheckSpec::RegionMeanOrder { groups, .. } => {
                    if groups.len() < 2 {
                        return Err(Error::Scenario("mean order needs at least two groups".into()));
                    }
                    for g in groups {
                        for &p in g {
                            check_player(p)?;
                        }
                    }
                }
                CheckSpec::InterfaceDecay { player, neighbor, from } => {
                    check_player(*player)?;
                    check_player(*neighbor)?;
                    check_player(*from)?;
                }
                CheckSpec::ArgmaxOnBoundary { player, .. } => check_player(*player)?,
                CheckSpec::ArgmaxNearInterface { player, neighbor, fraction } => {
                    check_player(*player)?;
                    check_player(*neighbor)?;
                    if !(0.0..=1.0).contains(fraction) {
                        return Err(Error::Scenario("fraction must lie in (0, 1]".into()));
                    }
                }
                CheckSpec::RegionMeanCompare { player_a, player_b, .. } => {
                    check_player(*player_a)?;
                    check_player(*player_b)?;
                }
                CheckSpec::StockLowNearBoundary { .. } => {}
                CheckSpec::NashDeviation { players: ps, scales } => {
                    for &p in ps {
                        check_player(p)?;
                    }
                    if let Some(scales) = scales {
                        if scales.iter().any(|&s| s <= 0.0) {
                            return Err(Error::Scenario("deviation scales must be positive".into()));
                        }
                    }
                }
                CheckSpec::PayoffMatchesValue { players: ps, tol } => {
                    for &p in ps {
                        check_player(p)?;
                    }
                    if *tol <= 0.0 {
                        return Err(Error::Scenario("payoff tolerance must be positive".into()));
                    }
                }
                CheckSpec::Transversality { players: ps, .. } => {
                    for &p in ps {
                        check_player(p)?;
                    }
                }
                CheckSpec::CompareScenario { emissions, stock, .. } => {
                    if emissions.is_none() && stock.is_none() {
                        return Err(Error::Scenario(
                            "scenario comparison needs an emissions or stock relation".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn resolution(&self, override_nx: Option<usize>, override_ny: Option<usize>) -> Result<(usize, usize)> {
        let x0 = self.domain.iter().map(|r| r.x[0]).fold(f64::INFINITY, f64::min);
        let x1 = self.domain.iter().map(|r| r.x[1]).fold(f64::NEG_INFINITY, f64::max);
        let y0 = self.domain.iter().map(|r| r.y[0]).fold(f64::INFINITY, f64::min);
        let y1 = self.domain.iter().map(|r| r.y[1]).fold(f64::NEG_INFINITY, f64::max);
        let from_h = |h: f64| -> Result<(usize, usize)> {
            let nx = (x1 - x0) / h;
            let ny = (y1 - y0) / h;
            for (label, v) in [("x", nx), ("y", ny)] {
                if (v - v.round()).abs() > 1e-9 * v.max(1.0) {
                    return Err(Error::Scenario(format!(
                        "cell size {h} does not tile the domain extent in {label}"
                    )));
                }
            }
            Ok((nx.round() as usize, ny.round() as usize))
        };
        match (override_nx, override_ny) {
            (Some(nx), Some(ny)) => Ok((nx, ny)),
            (None, None) => match (self.grid.h, self.grid.nx, self.grid.ny) {
                (Some(h), _, _) => from_h(h),
                (None, Some(nx), Some(ny)) => Ok((nx, ny)),
                _ => Err(Error::Scenario("grid resolution missing".into())),
            },
            _ => Err(Error::Scenario("override needs both nx and ny".into())),
        }
    }

    pub fn convection_field(&self) -> ConvectionField {
        ConvectionField::new(
            self.convection
                .iter()
                .map(|p| ConvectionPiece { rect: p.rect, half_plane: p.half_plane, value: p.value })
                .collect(),
        )
    }

    /// Build the grid, partition, operators and sampled convection.
    pub fn build(&self) -> Result<BuiltScenario> {
        self.build_with_resolution(None, None)
    }

    pub fn build_with_resolution(
        &self,
        nx: Option<usize>,
        ny: Option<usize>,
    ) -> Result<BuiltScenario> {
        self.validate()?;
        let (nx, ny) = self.resolution(nx, ny)?;
        let grid = Grid::build(&self.domain, nx, ny)?;
        let region_rects: Vec<Vec<Rect>> = self.regions.iter().map(|r| r.rects.clone()).collect();
        let partition = RegionPartition::build(&grid, &region_rects)?;
        let coeff = Coefficients {
            k: Coef::Constant(self.coefficients.k),
            c: Coef::Constant(self.coefficients.c),
            rho: self.coefficients.rho,
            phi: self.coefficients.phi.clone(),
        };
        coeff.validate(grid.n_cells(), partition.players())?;
        let convection = sample_convection(&self.convection_field(), &grid);
        let spec = BoundarySpec {
            side: self.boundary.side,
            default_alpha: self.boundary.alpha,
            rules: self
                .boundary
                .segments
                .iter()
                .map(|s| SegmentRule { on: SegmentLocus { axis: s.axis, at: s.at }, alpha: s.alpha })
                .collect(),
        };
        let bc = spec.resolve(&grid)?;
        let (primal, adjoint) = match self.boundary.side {
            BcSide::Primal => {
                let primal = assemble_primal(&grid, &coeff, &convection, &bc)?;
                let adjoint = assemble_adjoint(&primal);
                (primal, adjoint)
            }
            BcSide::Adjoint => {
                let adjoint = assemble_adjoint_direct(&grid, &coeff, &convection, &bc)?;
                let primal = assemble_adjoint(&adjoint);
                (primal, adjoint)
            }
        };
        Ok(BuiltScenario {
            scenario: self.clone(),
            grid,
            partition,
            coeff,
            convection,
            bc,
            primal,
            adjoint,
        })
    }
}

/// A scenario realized on a grid, with assembled operators.
pub struct BuiltScenario {
    pub scenario: Scenario,
    pub grid: Grid,
    pub partition: RegionPartition,
    pub coeff: Coefficients,
    pub convection: SampledConvection,
    pub bc: ResolvedBc,
    pub primal: SparseOperator,
    pub adjoint: SparseOperator,
}

impl BuiltScenario {
    pub fn solve_equilibrium(&self, tol: f64) -> Result<EquilibriumSolution> {
        solve_equilibrium(
            &self.grid,
            &self.partition,
            &self.coeff,
            &self.primal,
            &self.adjoint,
            tol,
        )
    }
}
