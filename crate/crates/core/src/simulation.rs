//! Time-domain oracle: backward-Euler integration of the controlled stock
//! dynamics and trapezoid quadrature of the discounted payoffs, used to
//! validate the closed-form equilibrium (value consistency, deviation tests,
//! transversality).

use crate::assembly::SparseOperator;
use crate::equilibrium::EquilibriumSolution;
use crate::error::{Error, Result};
use crate::field::{kahan_sum, Field};
use crate::geometry::{Grid, RegionPartition};
use crate::linsolve::ImplicitStepper;

/// Integrated trajectory of the stock under fixed (time-constant) controls.
#[derive(Debug)]
pub struct Trajectory {
    pub dt: f64,
    /// t_k = k dt for k = 0..=n_steps.
    pub times: Vec<f64>,
    /// Per step, per player: integral of P over the player's region.
    pub region_integrals: Vec<Vec<f64>>,
    /// Per step, per player: mean of P over the player's region.
    pub region_means: Vec<Vec<f64>>,
    /// Sparse snapshots (t, P), always including the final state.
    pub snapshots: Vec<(f64, Field)>,
    pub final_state: Field,
}

impl Trajectory {
    pub fn horizon(&self) -> f64 {
        *self.times.last().unwrap()
    }
}

/// Integrate `dP/dt = A P + sum_j u_j` from `p0` to `t = horizon`.
///
/// `observer` is called after every accepted step (and once at t = 0) with
/// the step index, time and current state.
pub fn simulate_observed<F>(
    primal: &SparseOperator,
    partition: &RegionPartition,
    grid: &Grid,
    p0: &Field,
    controls: &[Field],
    horizon: f64,
    dt: f64,
    snapshot_every: usize,
    tol: f64,
    mut observer: F,
) -> Result<Trajectory>
where
    F: FnMut(usize, f64, &Field),
{
    if dt <= 0.0 || horizon < dt {
        return Err(Error::Simulation(format!(
            "invalid time grid: horizon {horizon}, dt {dt}"
        )));
    }
    let n_steps = (horizon / dt).round() as usize;
    let mut source = Field::zeros(grid.n_cells());
    for u in controls {
        source = source.axpy(1.0, u);
    }
    let stepper = ImplicitStepper::new(primal, dt, tol)?;
    let players = partition.players();

    let mut times = Vec::with_capacity(n_steps + 1);
    let mut region_integrals = Vec::with_capacity(n_steps + 1);
    let mut region_means = Vec::with_capacity(n_steps + 1);
    let mut snapshots = Vec::new();

    let mut p = p0.clone();
    let record = |p: &Field, ints: &mut Vec<Vec<f64>>, means: &mut Vec<Vec<f64>>| {
        let mut int_row = Vec::with_capacity(players);
        let mut mean_row = Vec::with_capacity(players);
        for r in 0..players {
            int_row.push(partition.region_integral(r, p, grid));
            mean_row.push(partition.region_mean(r, p));
        }
        ints.push(int_row);
        means.push(mean_row);
    };

    times.push(0.0);
    record(&p, &mut region_integrals, &mut region_means);
    observer(0, 0.0, &p);
    if snapshot_every > 0 {
        snapshots.push((0.0, p.clone()));
    }

    for step in 1..=n_steps {
        p = stepper.step(&p, &source)?;
        if !p.all_finite() {
            return Err(Error::Simulation(format!(
                "non-finite state at t = {}",
                step as f64 * dt
            )));
        }
        let t = step as f64 * dt;
        times.push(t);
        record(&p, &mut region_integrals, &mut region_means);
        observer(step, t, &p);
        if snapshot_every > 0 && step % snapshot_every == 0 {
            snapshots.push((t, p.clone()));
        }
    }
    if snapshots.last().map(|(t, _)| *t) != Some(*times.last().unwrap()) {
        snapshots.push((*times.last().unwrap(), p.clone()));
    }

    Ok(Trajectory {
        dt,
        times,
        region_integrals,
        region_means,
        snapshots,
        final_state: p,
    })
}

/// Integrate the controlled dynamics without an observer.
pub fn simulate(
    primal: &SparseOperator,
    partition: &RegionPartition,
    grid: &Grid,
    p0: &Field,
    controls: &[Field],
    horizon: f64,
    dt: f64,
    snapshot_every: usize,
    tol: f64,
) -> Result<Trajectory> {
    simulate_observed(
        primal,
        partition,
        grid,
        p0,
        controls,
        horizon,
        dt,
        snapshot_every,
        tol,
        |_, _, _| {},
    )
}

/// Discounted payoff of one player along a trajectory.
#[derive(Debug, Clone)]
pub struct DiscountedPayoff {
    pub total: f64,
    /// Trapezoid quadrature over [0, T].
    pub quadrature: f64,
    /// Analytic continuation `e^{-rho T}/rho * (L_i - phi_i S_i(T))`,
    /// assuming the state stays at P(T) past the horizon.
    pub tail: f64,
    /// Relative distance of P(T) from stationarity of its own region
    /// integrals; large values mean the tail term is unreliable.
    pub tail_residual: f64,
}

/// `J_i = int_0^inf e^{-rho t} int_{Omega_i} (log u_i - phi_i P) dx dt`
/// by trapezoid-in-time, midpoint-in-space, plus the analytic steady tail.
///
/// `u_i` must be the control actually used for the trajectory; it enters
/// through its log-integral over the player's region.
pub fn discounted_payoff(
    player: usize,
    traj: &Trajectory,
    u_i: &Field,
    phi_i: f64,
    rho: f64,
    partition: &RegionPartition,
    grid: &Grid,
) -> Result<DiscountedPayoff> {
    let cells = partition.cells_of(player);
    for &c in cells {
        if u_i[c] <= 0.0 {
            return Err(Error::SignViolation(format!(
                "payoff of player {} needs positive emissions on its region; cell {c} has {}",
                player + 1,
                u_i[c]
            )));
        }
    }
    let log_term = grid.cell_volume() * kahan_sum(cells.iter().map(|&c| u_i[c].ln()));

    let running: Vec<f64> = traj
        .times
        .iter()
        .zip(&traj.region_integrals)
        .map(|(&t, ints)| (-rho * t).exp() * (log_term - phi_i * ints[player]))
        .collect();
    let mut quadrature = 0.0;
    for k in 0..running.len() - 1 {
        quadrature += 0.5 * traj.dt * (running[k] + running[k + 1]);
    }

    let t_end = traj.horizon();
    let s_end = traj.region_integrals.last().unwrap()[player];
    let tail = (-rho * t_end).exp() / rho * (log_term - phi_i * s_end);

    // Stationarity estimate from the last two recorded region integrals.
    let len = traj.region_integrals.len();
    let tail_residual = if len >= 2 {
        let prev = traj.region_integrals[len - 2][player];
        ((s_end - prev) / traj.dt).abs() / s_end.abs().max(1e-30)
    } else {
        f64::INFINITY
    };

    Ok(DiscountedPayoff { total: quadrature + tail, quadrature, tail, tail_residual })
}

/// Simulate a unilateral deviation: player `i` plays `scale * u_i`, everyone
/// else keeps the equilibrium field, and the deviating player's discounted
/// payoff is returned.
pub fn deviation_payoff(
    player: usize,
    scale: f64,
    equilibrium: &EquilibriumSolution,
    primal: &SparseOperator,
    partition: &RegionPartition,
    grid: &Grid,
    coeff_phi: &[f64],
    rho: f64,
    p0: &Field,
    horizon: f64,
    dt: f64,
    tol: f64,
) -> Result<DiscountedPayoff> {
    if scale <= 0.0 {
        return Err(Error::Simulation(format!(
            "deviation scale must be positive, got {scale}"
        )));
    }
    let mut controls: Vec<Field> = equilibrium.u.clone();
    controls[player] = controls[player].scaled(scale);
    let traj = simulate(primal, partition, grid, p0, &controls, horizon, dt, 0, tol)?;
    discounted_payoff(player, &traj, &controls[player], coeff_phi[player], rho, partition, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::{assemble_adjoint, assemble_primal, Coef, Coefficients};
    use crate::equilibrium::solve_equilibrium;
    use crate::geometry::{sample_convection, BoundarySpec, ConvectionField, Rect, RegionPartition};

    fn single_region(
        n: usize,
    ) -> (Grid, RegionPartition, Coefficients, SparseOperator, SparseOperator) {
        let g = Grid::build(&[Rect::new(0.0, 1.0, 0.0, 1.0)], n, n).unwrap();
        let p = RegionPartition::build(&g, &[vec![Rect::new(0.0, 1.0, 0.0, 1.0)]]).unwrap();
        let coeff = Coefficients {
            k: Coef::Constant(1.0),
            c: Coef::Constant(0.5),
            rho: 0.01,
            phi: vec![1.0],
        };
        let conv = sample_convection(&ConvectionField::none(), &g);
        let bc = BoundarySpec::insulated().resolve(&g).unwrap();
        let primal = assemble_primal(&g, &coeff, &conv, &bc).unwrap();
        let adjoint = assemble_adjoint(&primal);
        (g, p, coeff, primal, adjoint)
    }

    #[test]
    fn steady_start_stays_steady() {
        let (g, p, coeff, primal, adjoint) = single_region(10);
        let eq = solve_equilibrium(&g, &p, &coeff, &primal, &adjoint, 1e-12).unwrap();
        let traj =
            simulate(&primal, &p, &g, &eq.p_ss, &eq.u, 5.0, 0.1, 0, 1e-12).unwrap();
        let drift = traj.final_state.axpy(-1.0, &eq.p_ss).norm_inf();
        assert!(drift < 1e-8, "steady state drifted {drift:e}");
    }

    #[test]
    fn region_mean_follows_scalar_ode() {
        // From P_0 = 0 with u = 0.51: m(t) = 1.02 (1 - e^{-0.5 t}) up to O(dt).
        let (g, p, _coeff, primal, _) = single_region(10);
        let u = vec![Field::constant(g.n_cells(), 0.51)];
        let dt = 0.01;
        let traj = simulate(&primal, &p, &g, &Field::zeros(g.n_cells()), &u, 10.0, dt, 0, 1e-12)
            .unwrap();
        for (k, &t) in traj.times.iter().enumerate() {
            let exact = 1.02 * (1.0 - (-0.5 * t).exp());
            let got = traj.region_means[k][0];
            assert!(
                (got - exact).abs() <= 0.35 * dt,
                "t = {t}: mean {got} vs {exact}"
            );
        }
    }

    #[test]
    fn zero_controls_decay_monotonically() {
        let (g, p, _, primal, _) = single_region(8);
        let p0 = Field::constant(g.n_cells(), 2.0);
        let u = vec![Field::zeros(g.n_cells())];
        let traj = simulate(&primal, &p, &g, &p0, &u, 30.0, 0.1, 0, 1e-12).unwrap();
        let means: Vec<f64> = traj.region_means.iter().map(|r| r[0]).collect();
        for k in 1..means.len() {
            assert!(means[k] < means[k - 1]);
        }
        // Discrete decay (1 + c dt)^{-n} at t = 30 is below 1e-6.
        assert!(*means.last().unwrap() < 1e-5);
    }

    #[test]
    fn payoff_matches_value_at_zero_and_steady_start() {
        let (g, p, coeff, primal, adjoint) = single_region(10);
        let eq = solve_equilibrium(&g, &p, &coeff, &primal, &adjoint, 1e-12).unwrap();

        let run = |p0: &Field| {
            let traj = simulate(&primal, &p, &g, p0, &eq.u, 200.0, 0.01, 0, 1e-10).unwrap();
            discounted_payoff(0, &traj, &eq.u[0], 1.0, 0.01, &p, &g).unwrap()
        };

        // J(0) = V(0) = w = (log 0.51 - 1)/rho for the constant benchmark.
        let j0 = run(&Field::zeros(g.n_cells()));
        let w = (0.51f64.ln() - 1.0) / 0.01;
        assert!(
            (j0.total - w).abs() < 0.01 * w.abs(),
            "J(0) = {} vs w = {w}",
            j0.total
        );
        assert!(j0.tail_residual < 1e-6, "tail residual {}", j0.tail_residual);

        // J(P_ss) = V(P_ss) = w - 2.
        let jss = run(&eq.p_ss);
        let v_ss = w - 2.0;
        assert!(
            (jss.total - v_ss).abs() < 0.01 * v_ss.abs(),
            "J(P_ss) = {} vs V(P_ss) = {v_ss}",
            jss.total
        );
    }

    #[test]
    fn degenerate_payoff_path() {
        // phi = 0 and u = e on the region: J = |Omega| / rho exactly.
        let (g, p, _, primal, _) = single_region(8);
        let u = Field::constant(g.n_cells(), std::f64::consts::E);
        let traj = simulate(&primal, &p, &g, &Field::zeros(g.n_cells()), &[u.clone()], 50.0, 0.05, 0, 1e-12)
            .unwrap();
        let payoff = discounted_payoff(0, &traj, &u, 0.0, 0.01, &p, &g).unwrap();
        let expected = 1.0 / 0.01;
        assert!(
            (payoff.total - expected).abs() < 1e-5 * expected,
            "J = {} vs {expected}",
            payoff.total
        );
    }

    #[test]
    fn deviation_at_unit_scale_reproduces_equilibrium_payoff() {
        let (g, p, coeff, primal, adjoint) = single_region(8);
        let eq = solve_equilibrium(&g, &p, &coeff, &primal, &adjoint, 1e-12).unwrap();
        let p0 = Field::zeros(g.n_cells());
        let traj = simulate(&primal, &p, &g, &p0, &eq.u, 50.0, 0.05, 0, 1e-12).unwrap();
        let base = discounted_payoff(0, &traj, &eq.u[0], 1.0, 0.01, &p, &g).unwrap();
        let dev = deviation_payoff(
            0, 1.0, &eq, &primal, &p, &g, &coeff.phi, 0.01, &p0, 50.0, 0.05, 1e-12,
        )
        .unwrap();
        assert_eq!(base.total, dev.total);
    }

    #[test]
    fn deviations_are_unprofitable_and_unimodal() {
        let (g, p, coeff, primal, adjoint) = single_region(8);
        let eq = solve_equilibrium(&g, &p, &coeff, &primal, &adjoint, 1e-12).unwrap();
        let p0 = Field::zeros(g.n_cells());
        let scales = [0.5, 0.75, 0.9, 1.0, 1.1, 1.5, 2.0];
        let payoffs: Vec<f64> = scales
            .iter()
            .map(|&s| {
                deviation_payoff(
                    0, s, &eq, &primal, &p, &g, &coeff.phi, 0.01, &p0, 200.0, 0.01, 1e-10,
                )
                .unwrap()
                .total
            })
            .collect();
        let at_one = payoffs[3];
        for (s, j) in scales.iter().zip(&payoffs) {
            if *s != 1.0 {
                assert!(
                    *j < at_one,
                    "deviation s = {s} pays {j} >= equilibrium {at_one}"
                );
            }
        }
    }

    #[test]
    fn invalid_time_grid_rejected() {
        let (g, p, _, primal, _) = single_region(8);
        let p0 = Field::zeros(g.n_cells());
        let u = vec![Field::zeros(g.n_cells())];
        assert!(simulate(&primal, &p, &g, &p0, &u, 1.0, 0.0, 0, 1e-10).is_err());
        assert!(simulate(&primal, &p, &g, &p0, &u, 0.05, 0.1, 0, 1e-10).is_err());
    }
}
