use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pollution_game::error::Error;
use pollution_game::output::{
    field_to_csv, field_to_vtk, summary_csv, trajectory_csv, FieldFormat,
};
use pollution_game::scenario::{BuiltScenario, Scenario};
use pollution_game::simulation::{discounted_payoff, simulate};
use pollution_game::verify::run_verify;
use pollution_game::Field;

/// Equilibrium solver for the multiregional pollution game.
#[derive(Parser)]
#[command(name = "pollution-game", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Override the grid resolution (needs both --nx and --ny).
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    /// Relative residual tolerance for the linear solves.
    #[arg(long, default_value_t = pollution_game::linsolve::DEFAULT_TOL)]
    tol: f64,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Field file format: csv or vtk.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the equilibrium and write the v_i, u_i and steady-state fields.
    Solve(SolveArgs),
    /// Solve, then integrate the dynamics and report discounted payoffs.
    Simulate(SimulateArgs),
    /// Solve and run the scenario's invariant and qualitative checks.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    /// Simulation horizon override.
    #[arg(long = "T")]
    horizon: Option<f64>,
    /// Time step override.
    #[arg(long)]
    dt: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
}

fn build(common: &Common) -> Result<(BuiltScenario, FieldFormat), Error> {
    let format: FieldFormat = common.format.parse()?;
    let scenario = Scenario::load(&common.scenario)?;
    let built = scenario.build_with_resolution(common.nx, common.ny)?;
    std::fs::create_dir_all(&common.out)?;
    Ok((built, format))
}

fn write_field_file(
    field: &Field,
    built: &BuiltScenario,
    format: FieldFormat,
    name: &str,
    dir: &Path,
) -> Result<(), Error> {
    let path = dir.join(format!("{name}.{}", format.extension()));
    let text = match format {
        FieldFormat::Csv => field_to_csv(field, &built.grid),
        FieldFormat::Vtk => field_to_vtk(field, &built.grid, name),
    };
    std::fs::write(path, text)?;
    Ok(())
}

fn write_solution(
    eq: &pollution_game::EquilibriumSolution,
    built: &BuiltScenario,
    format: FieldFormat,
    dir: &Path,
) -> Result<String, Error> {
    for i in 0..built.partition.players() {
        write_field_file(&eq.v[i], built, format, &format!("v_{}", i + 1), dir)?;
        write_field_file(&eq.u[i], built, format, &format!("u_{}", i + 1), dir)?;
    }
    write_field_file(&eq.p_ss, built, format, "P_ss", dir)?;
    let summary = summary_csv(eq, &built.partition, &built.grid);
    std::fs::write(dir.join("summary.csv"), &summary)?;
    Ok(summary)
}

fn run_solve(args: &SolveArgs) -> Result<ExitCode, Error> {
    let (built, format) = build(&args.common)?;
    let eq = built.solve_equilibrium(args.common.tol)?;
    let dir = &args.common.out;
    let summary = write_solution(&eq, &built, format, dir)?;
    print!("{summary}");
    for (i, report) in eq.reports.iter().enumerate() {
        let label = if i < built.partition.players() {
            format!("player {}", i + 1)
        } else {
            "steady state".to_string()
        };
        eprintln!(
            "solve {label}: {} iterations, residual {:.2e}, {:.3}s",
            report.iterations, report.residual, report.wall_seconds
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn run_simulate(args: &SimulateArgs) -> Result<ExitCode, Error> {
    let (built, format) = build(&args.common)?;
    let eq = built.solve_equilibrium(args.common.tol)?;
    let dir = &args.common.out;
    write_solution(&eq, &built, format, dir)?;
    let horizon = args.horizon.unwrap_or(built.scenario.simulation.horizon);
    let dt = args.dt.unwrap_or(built.scenario.simulation.dt);
    let snapshot_every = built.scenario.simulation.snapshot_every;
    let traj = simulate(
        &built.primal,
        &built.partition,
        &built.grid,
        &Field::zeros(built.grid.n_cells()),
        &eq.u,
        horizon,
        dt,
        snapshot_every,
        args.common.tol,
    )?;
    std::fs::write(
        dir.join("trajectory.csv"),
        trajectory_csv(&traj, built.partition.players()),
    )?;
    write_field_file(&traj.final_state, &built, format, "P_final", dir)?;
    for (snap_idx, (t, p)) in traj.snapshots.iter().enumerate() {
        if snapshot_every > 0 {
            write_field_file(p, &built, format, &format!("P_{snap_idx:04}_t{t:.2}"), dir)?;
        }
    }

    let mut payoff_csv = String::from("player,J_sim,V_of_P0,rel_gap,tail_residual\n");
    println!("player  J_sim        V(P0)        rel_gap    tail_residual");
    for i in 0..built.partition.players() {
        let payoff = discounted_payoff(
            i,
            &traj,
            &eq.u[i],
            built.coeff.phi[i],
            built.coeff.rho,
            &built.partition,
            &built.grid,
        )?;
        let value = eq.value(i, &built.grid, &Field::zeros(built.grid.n_cells()));
        let rel = (payoff.total - value).abs() / value.abs().max(1e-30);
        payoff_csv.push_str(&format!(
            "{},{:.16e},{:.16e},{:.3e},{:.3e}\n",
            i + 1,
            payoff.total,
            value,
            rel,
            payoff.tail_residual
        ));
        println!(
            "{:<7} {:<12.4} {:<12.4} {:<10.2e} {:.2e}",
            i + 1,
            payoff.total,
            value,
            rel,
            payoff.tail_residual
        );
        if payoff.tail_residual > 1e-4 {
            eprintln!(
                "warning: trajectory of player {} not stationary at T (residual {:.2e}); the tail term is unreliable",
                i + 1,
                payoff.tail_residual
            );
        }
    }
    std::fs::write(dir.join("payoffs.csv"), payoff_csv)?;
    Ok(ExitCode::SUCCESS)
}

fn run_verify_cmd(args: &VerifyArgs) -> Result<ExitCode, Error> {
    let (built, _) = build(&args.common)?;
    let report = run_verify(&built, args.common.tol)?;
    for check in &report.checks {
        println!(
            "[{}] {}: {}",
            if check.passed { "PASS" } else { "FAIL" },
            check.name,
            check.detail
        );
    }
    std::fs::write(args.common.out.join("verify_report.json"), report.to_json())?;
    if report.passed {
        println!("verify: all {} checks passed", report.checks.len());
        Ok(ExitCode::SUCCESS)
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        println!("verify: {failed} of {} checks failed", report.checks.len());
        Ok(ExitCode::from(2))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Treat malformed invocations as input errors (exit 3), but let
            // --help/--version print normally.
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    let result = match &cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Verify(args) => run_verify_cmd(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
