//! Stationary feedback equilibrium of the emission game.
//!
//! Each player's value function is affine in the stock,
//! `V_i(P) = w_i + <v_i, P>`, where the gradient field `v_i` solves
//!
//! ```text
//! (A* - rho I) v_i = phi_i 1_{Omega_i},
//! ```
//!
//! the equilibrium emission field is `u_i = -1/v_i` on the player's own
//! region (zero outside), the constant is
//!
//! ```text
//! w_i = (1/rho) ( integral_{Omega_i} log(u_i) + sum_j integral_{Omega_j} v_i u_j ),
//! ```
//!
//! and the stationary stock solves `A P_ss + sum_j u_j = 0`. Because the
//! game is linear in the state, the equilibrium strategies are constant in
//! time and independent of the stock, so the fields above fully describe the
//! Markov-perfect equilibrium.
//!
//! The solves are sign-definite: the shifted operator is an M-matrix, so a
//! nonzero nonnegative load forces `v_i < 0` everywhere. A nonnegative `v_i`
//! cell is reported as an error rather than clamped; it indicates a broken
//! maximum principle (for example a non-upwinded convection term), never a
//! legitimate solution.

use crate::assembly::{indicator_load, Coefficients, SparseOperator};
use crate::error::{Error, Result};
use crate::field::{kahan_sum, Field};
use crate::geometry::{Grid, RegionPartition};
use crate::linsolve::{Factorized, SolveReport};

/// Per-player equilibrium data plus the shared steady-state stock.
#[derive(Debug)]
pub struct EquilibriumSolution {
    /// Value-gradient fields v_i, strictly negative.
    pub v: Vec<Field>,
    /// Emission fields u_i, positive on the player's region, zero outside.
    pub u: Vec<Field>,
    /// Value constants w_i.
    pub w: Vec<f64>,
    /// Steady-state pollution stock.
    pub p_ss: Field,
    /// Solver reports: one per player, then the steady-state solve.
    pub reports: Vec<SolveReport>,
}

impl EquilibriumSolution {
    /// Affine value of player `i` at stock `p`.
    pub fn value(&self, i: usize, grid: &Grid, p: &Field) -> f64 {
        value_function(self.w[i], &self.v[i], grid, p)
    }

    /// Total equilibrium emission field, sum over players.
    pub fn total_emissions(&self) -> Field {
        let mut total = Field::zeros(self.p_ss.len());
        for u in &self.u {
            total = total.axpy(1.0, u);
        }
        total
    }
}

/// Solve `(A* - rho I) v = load` and enforce the sign invariant.
pub fn solve_player_value(
    adjoint: &SparseOperator,
    rho: f64,
    load: &Field,
    tol: f64,
) -> Result<(Field, SolveReport)> {
    if rho <= 0.0 {
        return Err(Error::InvalidCoefficients(format!("rho must be positive, got {rho}")));
    }
    let shifted = adjoint.matrix.scaled_identity_plus(-rho, 1.0);
    let (v, report) = Factorized::new(shifted)?.solve(load, tol)?;
    check_value_sign(&v, load)?;
    Ok((v, report))
}

fn check_value_sign(v: &Field, load: &Field) -> Result<()> {
    if load.values().iter().all(|&l| l == 0.0) {
        return Ok(());
    }
    for (c, &val) in v.values().iter().enumerate() {
        if val >= 0.0 {
            return Err(Error::SignViolation(format!(
                "value gradient is nonnegative ({val:e}) at cell {c}; \
                 the discrete maximum principle failed"
            )));
        }
    }
    Ok(())
}

/// Equilibrium emissions `u_i = -1/v_i` on the player's region, zero outside.
pub fn emissions_from_value(
    v_i: &Field,
    partition: &RegionPartition,
    player: usize,
) -> Result<Field> {
    let mut u = Field::zeros(v_i.len());
    for &c in partition.cells_of(player) {
        if v_i[c] >= 0.0 {
            return Err(Error::SignViolation(format!(
                "cannot form emissions: v_{} is {:e} >= 0 at cell {c}",
                player + 1,
                v_i[c]
            )));
        }
        u[c] = -1.0 / v_i[c];
    }
    Ok(u)
}

/// Value constant of player `i` from the assembled equilibrium fields,
/// computed with the positive emission fields in place of the ratios
/// `v_i / v_j = -v_i u_j`.
pub fn compute_w(
    player: usize,
    v: &[Field],
    u: &[Field],
    partition: &RegionPartition,
    grid: &Grid,
    rho: f64,
) -> Result<f64> {
    if u.len() != partition.players() || v.len() != partition.players() {
        return Err(Error::Scenario(format!(
            "compute_w needs all {} players' fields, got {} values / {} emissions",
            partition.players(),
            v.len(),
            u.len()
        )));
    }
    let vol = grid.cell_volume();
    let own_log = vol
        * kahan_sum(
            partition
                .cells_of(player)
                .iter()
                .map(|&c| u[player][c].ln()),
        );
    let mut cross = 0.0;
    for (j, u_j) in u.iter().enumerate() {
        cross += vol
            * kahan_sum(
                partition
                    .cells_of(j)
                    .iter()
                    .map(|&c| v[player][c] * u_j[c]),
            );
    }
    Ok((own_log + cross) / rho)
}

/// Steady-state stock: `A P_ss + sum_j u_j = 0`, with nonnegativity enforced.
pub fn steady_state_pollution(
    primal: &SparseOperator,
    u: &[Field],
    tol: f64,
) -> Result<(Field, SolveReport)> {
    let n = primal.n();
    let mut load = Field::zeros(n);
    for u_j in u {
        load = load.axpy(1.0, u_j);
    }
    let (p_ss, report) = Factorized::new(primal.matrix.clone())
        .map_err(|e| match e {
            Error::SingularOperator(msg) => Error::SingularOperator(format!(
                "no steady state exists (insulated boundary with no decay): {msg}"
            )),
            other => other,
        })?
        .solve(&load.scaled(-1.0), tol)?;
    let floor = -1e-10 * p_ss.norm_inf().max(1.0);
    if let Some((c, &bad)) = p_ss
        .values()
        .iter()
        .enumerate()
        .find(|(_, &v)| v < floor)
    {
        return Err(Error::SignViolation(format!(
            "steady-state stock is negative ({bad:e}) at cell {c}"
        )));
    }
    Ok((p_ss, report))
}

/// Affine value `V_i(P) = w_i + <v_i, P>_h`.
pub fn value_function(w_i: f64, v_i: &Field, grid: &Grid, p: &Field) -> f64 {
    w_i + grid.inner_product(v_i, p)
}

/// Run the full per-player pipeline: J adjoint solves, emissions, value
/// constants, and one primal steady-state solve.
pub fn solve_equilibrium(
    grid: &Grid,
    partition: &RegionPartition,
    coeff: &Coefficients,
    primal: &SparseOperator,
    adjoint: &SparseOperator,
    tol: f64,
) -> Result<EquilibriumSolution> {
    coeff.validate(grid.n_cells(), partition.players())?;
    let players = partition.players();
    let shifted = Factorized::new(adjoint.matrix.scaled_identity_plus(-coeff.rho, 1.0))?;
    let mut v = Vec::with_capacity(players);
    let mut u = Vec::with_capacity(players);
    let mut reports = Vec::with_capacity(players + 1);
    for i in 0..players {
        let load = indicator_load(partition, i, coeff.phi[i]);
        let (v_i, report) = shifted.solve(&load, tol)?;
        check_value_sign(&v_i, &load)?;
        let u_i = emissions_from_value(&v_i, partition, i)?;
        v.push(v_i);
        u.push(u_i);
        reports.push(report);
    }
    let mut w = Vec::with_capacity(players);
    for i in 0..players {
        w.push(compute_w(i, &v, &u, partition, grid, coeff.rho)?);
    }
    let (p_ss, report) = steady_state_pollution(primal, &u, tol)?;
    reports.push(report);
    Ok(EquilibriumSolution { v, u, w, p_ss, reports })
}
