//! Scenario verification: structural invariants that every run must satisfy
//! (discrete adjoint identity, sign conditions, area bookkeeping) plus the
//! qualitative checks declared in the scenario file (symmetries, orderings,
//! deviation and transversality tests backed by the time-domain oracle).

use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::equilibrium::EquilibriumSolution;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{Axis, AxisName, Grid};
use crate::scenario::{BuiltScenario, CheckSpec, FieldKind, MirrorKind, Relation, Scenario};
use crate::simulation::{deviation_payoff, discounted_payoff, simulate, simulate_observed, Trajectory};

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
}

impl CheckResult {
    fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        CheckResult { name: name.into(), passed: false, detail: detail.into(), margin: None }
    }

    fn from_margin(name: impl Into<String>, margin: f64, detail: String) -> Self {
        CheckResult { name: name.into(), passed: margin > 0.0, detail, margin: Some(margin) }
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyReport {
    pub scenario: String,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Lazily simulated equilibrium trajectories shared between checks.
struct TrajectoryCache {
    from_zero: Option<Trajectory>,
    from_steady: Option<Trajectory>,
}

impl TrajectoryCache {
    fn get(
        &mut self,
        from_steady: bool,
        built: &BuiltScenario,
        eq: &EquilibriumSolution,
        tol: f64,
    ) -> Result<&Trajectory> {
        let slot = if from_steady { &mut self.from_steady } else { &mut self.from_zero };
        if slot.is_none() {
            let sim = &built.scenario.simulation;
            let p0 = if from_steady {
                eq.p_ss.clone()
            } else {
                Field::zeros(built.grid.n_cells())
            };
            *slot = Some(simulate(
                &built.primal,
                &built.partition,
                &built.grid,
                &p0,
                &eq.u,
                sim.horizon,
                sim.dt,
                0,
                tol,
            )?);
        }
        Ok(slot.as_ref().unwrap())
    }
}

/// Mirror image of a compact cell index; `None` when the image is inactive.
fn mirrored_cell(
    grid: &Grid,
    c: usize,
    kind: MirrorKind,
    at: Option<f64>,
    center: Option<[f64; 2]>,
) -> Option<usize> {
    let (i, j) = grid.cell_ij(c);
    let (x, y) = grid.cell_center(c);
    let (x0, y0) = grid.origin();
    let map = |coord: f64, pivot: f64, origin: f64, h: f64| -> Option<usize> {
        let mirrored = 2.0 * pivot - coord;
        let idx = (mirrored - origin) / h - 0.5;
        let r = idx.round();
        if (idx - r).abs() > 1e-6 || r < 0.0 {
            return None;
        }
        Some(r as usize)
    };
    let (mi, mj) = match kind {
        MirrorKind::X => (map(x, at?, x0, grid.hx())?, j),
        MirrorKind::Y => (i, map(y, at?, y0, grid.hy())?),
        MirrorKind::Point => {
            let ctr = center?;
            (map(x, ctr[0], x0, grid.hx())?, map(y, ctr[1], y0, grid.hy())?)
        }
    };
    grid.compact_at(mi, mj)
}

fn region_mean_of(
    built: &BuiltScenario,
    eq: &EquilibriumSolution,
    field: FieldKind,
    region: usize,
) -> f64 {
    match field {
        FieldKind::Emissions => built.partition.region_mean(region, &eq.u[region]),
        FieldKind::Stock => built.partition.region_mean(region, &eq.p_ss),
    }
}

fn field_label(field: FieldKind) -> &'static str {
    match field {
        FieldKind::Emissions => "mean emissions",
        FieldKind::Stock => "mean stock",
    }
}

/// Check the discrete adjoint identity `<A p, v>_h = <p, A* v>_h` on random
/// field pairs.
pub fn adjoint_identity_check(built: &BuiltScenario, pairs: usize, tol: f64) -> CheckResult {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xD1CE);
    let n = built.grid.n_cells();
    let mut worst: f64 = 0.0;
    for _ in 0..pairs {
        let p = Field::from_vec((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let v = Field::from_vec((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect());
        let lhs = built.grid.inner_product(&built.primal.apply(&p), &v);
        let rhs = built.grid.inner_product(&p, &built.adjoint.apply(&v));
        let rel = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1e-300);
        worst = worst.max(rel);
    }
    CheckResult {
        name: "adjoint_identity".into(),
        passed: worst <= tol,
        detail: format!(
            "max relative defect {worst:.2e} over {pairs} random pairs (tolerance {tol:.0e})"
        ),
        margin: Some(tol - worst),
    }
}

fn builtin_checks(built: &BuiltScenario, eq: &EquilibriumSolution) -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.push(adjoint_identity_check(built, 50, 1e-13));

    let mut worst_v = f64::NEG_INFINITY;
    let mut min_u = f64::INFINITY;
    for (i, v_i) in eq.v.iter().enumerate() {
        worst_v = worst_v.max(v_i.max());
        for &c in built.partition.cells_of(i) {
            min_u = min_u.min(eq.u[i][c]);
        }
    }
    out.push(CheckResult::from_margin(
        "value_gradient_negative",
        -worst_v,
        format!("max v_i over all players and cells is {worst_v:.3e}"),
    ));
    out.push(CheckResult::from_margin(
        "emissions_positive",
        min_u,
        format!("min u_i over each player's own region is {min_u:.3e}"),
    ));

    let min_pss = eq.p_ss.min();
    out.push(CheckResult {
        name: "stock_nonnegative".into(),
        passed: min_pss >= -1e-10 * eq.p_ss.norm_inf().max(1.0),
        detail: format!("min P_ss = {min_pss:.3e}"),
        margin: Some(min_pss),
    });

    let total: f64 = built.partition.areas().iter().sum();
    let defect = (total - built.grid.total_area()).abs() / built.grid.total_area();
    out.push(CheckResult {
        name: "area_additivity".into(),
        passed: defect <= 1e-12,
        detail: format!("sum of region areas differs from |Omega| by {defect:.2e} rel"),
        margin: Some(1e-12 - defect),
    });

    let max_div = built.convection.max_divergence();
    out.push(CheckResult {
        name: "convection_divergence_report".into(),
        passed: true,
        detail: format!(
            "max |discrete div b| = {max_div:.3e}, {} flagged cells",
            built.convection.flagged_cells.len()
        ),
        margin: None,
    });
    out
}

fn run_check(
    built: &BuiltScenario,
    eq: &EquilibriumSolution,
    cache: &mut TrajectoryCache,
    tol: f64,
    spec: &CheckSpec,
) -> Result<CheckResult> {
    let grid = &built.grid;
    let partition = &built.partition;
    match spec {
        CheckSpec::MirrorU { axis, at, center, player_a, player_b, tol: mtol } => {
            let (a, b) = (player_a - 1, player_b - 1);
            let name = format!("mirror_u_{player_a}_{player_b}");
            let mut worst: f64 = 0.0;
            for c in 0..grid.n_cells() {
                match mirrored_cell(grid, c, *axis, *at, *center) {
                    Some(m) => worst = worst.max((eq.u[a][c] - eq.u[b][m]).abs()),
                    None => {
                        return Ok(CheckResult::fail(
                            name,
                            format!("cell {c} has no mirror image inside the domain"),
                        ))
                    }
                }
            }
            Ok(CheckResult {
                name,
                passed: worst <= *mtol,
                detail: format!(
                    "max |u_{player_a} - mirror(u_{player_b})| = {worst:.2e} (tolerance {mtol:.0e})"
                ),
                margin: Some(mtol - worst),
            })
        }
        CheckSpec::EmissionsIncreaseToward { player, axis, at } => {
            let p = player - 1;
            let name = format!("emissions_increase_toward_{player}");
            let mut lines: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
            for &c in partition.cells_of(p) {
                let (i, j) = grid.cell_ij(c);
                match axis {
                    AxisName::X => lines.entry(j).or_default().push(c),
                    AxisName::Y => lines.entry(i).or_default().push(c),
                }
            }
            let mut min_step = f64::INFINITY;
            let mut comparisons = 0usize;
            for cells in lines.values() {
                let mut with_dist: Vec<(f64, usize)> = cells
                    .iter()
                    .map(|&c| {
                        let (x, y) = grid.cell_center(c);
                        let coord = match axis {
                            AxisName::X => x,
                            AxisName::Y => y,
                        };
                        ((coord - at).abs(), c)
                    })
                    .collect();
                with_dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
                for w in with_dist.windows(2) {
                    if w[1].0 > w[0].0 {
                        min_step = min_step.min(eq.u[p][w[0].1] - eq.u[p][w[1].1]);
                        comparisons += 1;
                    }
                }
            }
            Ok(CheckResult::from_margin(
                name,
                min_step,
                format!(
                    "emissions of player {player} decay away from the line over {comparisons} comparisons; smallest strict step {min_step:.3e}"
                ),
            ))
        }
        CheckSpec::RegionMeanOrder { field, groups } => {
            let name = format!("{}_order", field_label(*field).replace(' ', "_"));
            let means: Vec<Vec<f64>> = groups
                .iter()
                .map(|g| g.iter().map(|&p| region_mean_of(built, eq, *field, p - 1)).collect())
                .collect();
            let mut min_gap = f64::INFINITY;
            for k in 0..means.len() - 1 {
                let lo = means[k].iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = means[k + 1].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                min_gap = min_gap.min(lo - hi);
            }
            let pretty: Vec<String> = groups
                .iter()
                .zip(&means)
                .map(|(g, m)| {
                    let vals: Vec<String> = m.iter().map(|v| format!("{v:.4}")).collect();
                    format!("{g:?}: {}", vals.join(","))
                })
                .collect();
            Ok(CheckResult::from_margin(
                name,
                min_gap,
                format!(
                    "{} strictly ordered across groups [{}] (min gap {min_gap:.3e})",
                    field_label(*field),
                    pretty.join(" > ")
                ),
            ))
        }
        CheckSpec::InterfaceDecay { player, neighbor, from } => {
            let name = format!("interface_decay_{player}_{neighbor}");
            let (p, nb, f) = (player - 1, neighbor - 1, from - 1);
            let interface = partition.interface(p, nb).ok_or_else(|| {
                Error::Scenario(format!("players {player} and {neighbor} share no interface"))
            })?;
            let mut cells: Vec<usize> = interface
                .faces
                .iter()
                .map(|&fi| {
                    let face = &grid.interior_faces()[fi];
                    if partition.region_of(face.lo) == p {
                        face.lo
                    } else {
                        face.hi
                    }
                })
                .collect();
            cells.sort_unstable();
            cells.dedup();
            let from_cells = partition.cells_of(f);
            let dist = |c: usize| -> f64 {
                let (x, y) = grid.cell_center(c);
                from_cells
                    .iter()
                    .map(|&fc| {
                        let (fx, fy) = grid.cell_center(fc);
                        ((x - fx).powi(2) + (y - fy).powi(2)).sqrt()
                    })
                    .fold(f64::INFINITY, f64::min)
            };
            let mut with_dist: Vec<(f64, usize)> = cells.iter().map(|&c| (dist(c), c)).collect();
            with_dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mut min_step = f64::INFINITY;
            for w in with_dist.windows(2) {
                if w[1].0 > w[0].0 + 1e-12 {
                    min_step = min_step.min(eq.u[p][w[0].1] - eq.u[p][w[1].1]);
                }
            }
            Ok(CheckResult::from_margin(
                name,
                min_step,
                format!(
                    "u_{player} along the {player}-{neighbor} interface decays with distance from region {from} over {} cells (min strict step {min_step:.3e})",
                    with_dist.len()
                ),
            ))
        }
        CheckSpec::ArgmaxOnBoundary { player, axis, at } => {
            let p = player - 1;
            let name = format!("argmax_on_boundary_{player}");
            let (_, (x, y)) = partition.region_argmax(p, &eq.u[p], grid);
            let (coord, h) = match axis {
                AxisName::X => (x, grid.hx()),
                AxisName::Y => (y, grid.hy()),
            };
            let gap = (coord - at).abs();
            Ok(CheckResult {
                name,
                passed: gap <= 0.6 * h,
                detail: format!(
                    "emission argmax of player {player} at ({x:.4}, {y:.4}), {gap:.4} from the boundary line"
                ),
                margin: Some(0.6 * h - gap),
            })
        }
        CheckSpec::ArgmaxNearInterface { player, neighbor, fraction } => {
            let p = player - 1;
            let nb = neighbor - 1;
            let name = format!("argmax_near_interface_{player}_{neighbor}");
            let interface = partition.interface(p, nb).ok_or_else(|| {
                Error::Scenario(format!("players {player} and {neighbor} share no interface"))
            })?;
            let face0 = &grid.interior_faces()[interface.faces[0]];
            let axis = face0.axis;
            let line = match axis {
                Axis::X => face0.midpoint.0,
                Axis::Y => face0.midpoint.1,
            };
            let coords: Vec<f64> = partition
                .cells_of(p)
                .iter()
                .map(|&c| {
                    let (x, y) = grid.cell_center(c);
                    match axis {
                        Axis::X => x,
                        Axis::Y => y,
                    }
                })
                .collect();
            let lo = coords.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = coords.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let extent = hi - lo
                + match axis {
                    Axis::X => grid.hx(),
                    Axis::Y => grid.hy(),
                };
            let (_, (ax, ay)) = partition.region_argmax(p, &eq.u[p], grid);
            let coord = match axis {
                Axis::X => ax,
                Axis::Y => ay,
            };
            let gap = (coord - line).abs();
            let band = fraction * extent;
            Ok(CheckResult {
                name,
                passed: gap <= band,
                detail: format!(
                    "emission argmax of player {player} at ({ax:.4}, {ay:.4}), {gap:.4} from the interface with player {neighbor} (band {band:.4})"
                ),
                margin: Some(band - gap),
            })
        }
        CheckSpec::RegionMeanCompare { field, player_a, player_b, relation } => {
            let name = format!(
                "{}_compare_{player_a}_{player_b}",
                field_label(*field).replace(' ', "_")
            );
            let a = region_mean_of(built, eq, *field, player_a - 1);
            let b = region_mean_of(built, eq, *field, player_b - 1);
            let margin = match relation {
                Relation::Greater => a - b,
                Relation::Less => b - a,
            };
            let rel = match relation {
                Relation::Greater => ">",
                Relation::Less => "<",
            };
            Ok(CheckResult::from_margin(
                name,
                margin,
                format!(
                    "{} of player {player_a} ({a:.4}) {rel} player {player_b} ({b:.4})",
                    field_label(*field)
                ),
            ))
        }
        CheckSpec::StockLowNearBoundary { axis, at } => {
            let name = "stock_low_near_boundary".to_string();
            let loc_tol = 1e-9 * grid.hx().max(grid.hy()).max(1.0);
            let mut near = Vec::new();
            for face in grid.boundary_faces() {
                let matches = match axis {
                    AxisName::X => {
                        face.outward.axis() == Axis::X && (face.midpoint.0 - at).abs() <= loc_tol
                    }
                    AxisName::Y => {
                        face.outward.axis() == Axis::Y && (face.midpoint.1 - at).abs() <= loc_tol
                    }
                };
                if matches {
                    near.push(face.cell);
                }
            }
            if near.is_empty() {
                return Ok(CheckResult::fail(name, "no boundary faces on that segment"));
            }
            near.sort_unstable();
            near.dedup();
            let near_mean: f64 = near.iter().map(|&c| eq.p_ss[c]).sum::<f64>() / near.len() as f64;
            let domain_mean = grid.integral(&eq.p_ss) / grid.total_area();
            Ok(CheckResult::from_margin(
                name,
                domain_mean - near_mean,
                format!(
                    "stock near the open boundary averages {near_mean:.4} vs domain mean {domain_mean:.4}"
                ),
            ))
        }
        CheckSpec::NashDeviation { players, scales } => {
            let scales = scales
                .clone()
                .unwrap_or_else(|| built.scenario.simulation.deviation_scales.clone());
            let sim = built.scenario.simulation.clone();
            let p0 = Field::zeros(grid.n_cells());
            let mut min_gap = f64::INFINITY;
            let mut rows = Vec::new();
            for &player in players {
                let i = player - 1;
                let base = {
                    let traj = cache.get(false, built, eq, tol)?;
                    discounted_payoff(
                        i,
                        traj,
                        &eq.u[i],
                        built.coeff.phi[i],
                        built.coeff.rho,
                        partition,
                        grid,
                    )?
                    .total
                };
                for &s in &scales {
                    if (s - 1.0).abs() < 1e-12 {
                        continue;
                    }
                    let j = deviation_payoff(
                        i,
                        s,
                        eq,
                        &built.primal,
                        partition,
                        grid,
                        &built.coeff.phi,
                        built.coeff.rho,
                        &p0,
                        sim.horizon,
                        sim.dt,
                        tol,
                    )?
                    .total;
                    let gap = base - j;
                    min_gap = min_gap.min(gap);
                    rows.push(format!("player {player} s={s}: loss {gap:.4}"));
                }
            }
            Ok(CheckResult::from_margin(
                "nash_deviation",
                min_gap,
                format!("unilateral deviations all pay less: {}", rows.join("; ")),
            ))
        }
        CheckSpec::PayoffMatchesValue { players, tol: ptol } => {
            let mut worst: f64 = 0.0;
            let mut rows = Vec::new();
            for &player in players {
                let i = player - 1;
                for from_steady in [false, true] {
                    let p0 = if from_steady {
                        eq.p_ss.clone()
                    } else {
                        Field::zeros(grid.n_cells())
                    };
                    let value = eq.value(i, grid, &p0);
                    let payoff = {
                        let traj = cache.get(from_steady, built, eq, tol)?;
                        discounted_payoff(
                            i,
                            traj,
                            &eq.u[i],
                            built.coeff.phi[i],
                            built.coeff.rho,
                            partition,
                            grid,
                        )?
                        .total
                    };
                    let rel = (payoff - value).abs() / value.abs().max(1e-30);
                    worst = worst.max(rel);
                    let start = if from_steady { "steady" } else { "zero" };
                    rows.push(format!(
                        "player {player} from {start}: J {payoff:.4} vs V {value:.4} ({rel:.2e})"
                    ));
                }
            }
            Ok(CheckResult {
                name: "payoff_matches_value".into(),
                passed: worst <= *ptol,
                detail: format!("simulated payoffs match affine values: {}", rows.join("; ")),
                margin: Some(ptol - worst),
            })
        }
        CheckSpec::Transversality { players, settle, bound_fraction } => {
            let sim = built.scenario.simulation.clone();
            let rho = built.coeff.rho;
            let stride = ((1.0 / sim.dt).round() as usize).max(1);
            let n_steps = (sim.horizon / sim.dt).round() as usize;
            let idx: Vec<usize> = players.iter().map(|&p| p - 1).collect();
            let mut samples: Vec<(f64, Vec<f64>)> = Vec::new();
            simulate_observed(
                &built.primal,
                partition,
                grid,
                &Field::zeros(grid.n_cells()),
                &eq.u,
                sim.horizon,
                sim.dt,
                0,
                tol,
                |step, t, p| {
                    if step % stride == 0 || step == n_steps {
                        let vals: Vec<f64> = idx
                            .iter()
                            .map(|&i| (-rho * t).exp() * eq.value(i, grid, p).abs())
                            .collect();
                        samples.push((t, vals));
                    }
                },
            )?;
            let mut min_decrease = f64::INFINITY;
            let mut end_ok = true;
            let mut rows = Vec::new();
            for (pi, &player) in players.iter().enumerate() {
                let i = player - 1;
                let v0 = eq.w[i].abs();
                let series: Vec<(f64, f64)> =
                    samples.iter().map(|(t, vals)| (*t, vals[pi])).collect();
                for w in series.windows(2) {
                    if w[0].0 >= *settle {
                        min_decrease = min_decrease.min(w[0].1 - w[1].1);
                    }
                }
                let last = series.last().unwrap().1;
                let bound = bound_fraction * v0;
                if last >= bound {
                    end_ok = false;
                }
                rows.push(format!(
                    "player {player}: e^(-rho T)|V| = {last:.3} vs bound {bound:.3}"
                ));
            }
            Ok(CheckResult {
                name: "transversality".into(),
                passed: end_ok && min_decrease > 0.0,
                detail: format!(
                    "discounted value decays along the equilibrium path (min step {min_decrease:.3e}); {}",
                    rows.join("; ")
                ),
                margin: Some(min_decrease),
            })
        }
        CheckSpec::CompareScenario { path, emissions, stock } => {
            let base = built.scenario.base_dir.clone().unwrap_or_default();
            let other = Scenario::load(&base.join(path))?;
            let other_built = other.build()?;
            let other_eq = other_built.solve_equilibrium(tol)?;
            let name = format!("compare_{}", other.name);

            let domain_mean = |b: &BuiltScenario, e: &EquilibriumSolution, f: FieldKind| -> f64 {
                match f {
                    FieldKind::Emissions => {
                        b.grid.integral(&e.total_emissions()) / b.grid.total_area()
                    }
                    FieldKind::Stock => b.grid.integral(&e.p_ss) / b.grid.total_area(),
                }
            };
            let mut min_margin = f64::INFINITY;
            let mut rows = Vec::new();
            for (fk, rel) in [(FieldKind::Emissions, emissions), (FieldKind::Stock, stock)] {
                if let Some(rel) = rel {
                    let ours = domain_mean(built, eq, fk);
                    let theirs = domain_mean(&other_built, &other_eq, fk);
                    let margin = match rel {
                        Relation::Greater => ours - theirs,
                        Relation::Less => theirs - ours,
                    };
                    min_margin = min_margin.min(margin);
                    rows.push(format!(
                        "{} {ours:.4} vs {theirs:.4} ({})",
                        field_label(fk),
                        match rel {
                            Relation::Greater => "expected greater",
                            Relation::Less => "expected less",
                        }
                    ));
                }
            }
            Ok(CheckResult::from_margin(
                name,
                min_margin,
                format!("against {}: {}", other.name, rows.join("; ")),
            ))
        }
    }
}

/// Run the built-in invariants plus every check declared in the scenario.
pub fn run_verify(built: &BuiltScenario, tol: f64) -> Result<VerifyReport> {
    let eq = built.solve_equilibrium(tol)?;
    let mut checks = builtin_checks(built, &eq);
    let mut cache = TrajectoryCache { from_zero: None, from_steady: None };
    for spec in &built.scenario.checks {
        checks.push(run_check(built, &eq, &mut cache, tol, spec)?);
    }
    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyReport { scenario: built.scenario.name.clone(), passed, checks })
}

/// Run an explicit list of checks against an already solved equilibrium,
/// sharing simulated trajectories between them.
pub fn run_checks(
    built: &BuiltScenario,
    eq: &EquilibriumSolution,
    specs: &[CheckSpec],
    tol: f64,
) -> Result<Vec<CheckResult>> {
    let mut cache = TrajectoryCache { from_zero: None, from_steady: None };
    specs
        .iter()
        .map(|spec| run_check(built, eq, &mut cache, tol, spec))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_PLAYER: &str = r#"
name = "two_player"

[grid]
h = 0.05

[[domain]]
x = [0.0, 1.0]
y = [0.0, 1.0]

[[region]]
rects = [{ x = [0.0, 0.5], y = [0.0, 1.0] }]

[[region]]
rects = [{ x = [0.5, 1.0], y = [0.0, 1.0] }]

[coefficients]
k = 1.0
c = 0.5
rho = 0.01
phi = [1.0, 1.0]

[simulation]
horizon = 60.0
dt = 0.05

[[checks]]
kind = "mirror_u"
axis = "x"
at = 0.5
player_a = 1
player_b = 2
tol = 1e-9

[[checks]]
kind = "emissions_increase_toward"
player = 1
axis = "x"
at = 0.5
"#;

    #[test]
    fn two_player_verify_passes() {
        let s = Scenario::parse_str(TWO_PLAYER).unwrap();
        let built = s.build().unwrap();
        let report = run_verify(&built, 1e-11).unwrap();
        for check in &report.checks {
            assert!(check.passed, "{}: {}", check.name, check.detail);
        }
        assert!(report.passed);
        let json = report.to_json();
        assert!(json.contains("adjoint_identity"));
    }

    #[test]
    fn mirrored_cell_maps_back() {
        let s = Scenario::parse_str(TWO_PLAYER).unwrap();
        let built = s.build().unwrap();
        for c in 0..built.grid.n_cells() {
            let m = mirrored_cell(&built.grid, c, MirrorKind::X, Some(0.5), None).unwrap();
            let back = mirrored_cell(&built.grid, m, MirrorKind::X, Some(0.5), None).unwrap();
            assert_eq!(back, c);
        }
    }
}
