//! Long-horizon agreement between the time stepper and the elliptic steady
//! state: || P(T) - P_ss ||_inf / || P_ss ||_inf <= 1e-4 at T = 200 on every
//! bundled scenario.

use std::path::PathBuf;

use pollution_game::scenario::Scenario;
use pollution_game::simulation::simulate;
use pollution_game::Field;

fn steady_state_gap(name: &str) -> f64 {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("scenarios/{name}.toml"));
    let built = Scenario::load(&path).unwrap().build().unwrap();
    let eq = built.solve_equilibrium(1e-11).unwrap();
    let traj = simulate(
        &built.primal,
        &built.partition,
        &built.grid,
        &Field::zeros(built.grid.n_cells()),
        &eq.u,
        200.0,
        0.01,
        0,
        1e-10,
    )
    .unwrap();
    let gap = traj.final_state.axpy(-1.0, &eq.p_ss).norm_inf() / eq.p_ss.norm_inf();
    println!("{name}: ||P(200) - P_ss|| / ||P_ss|| = {gap:.3e}");
    gap
}

macro_rules! steady_state_test {
    ($test:ident, $name:literal) => {
        #[test]
        fn $test() {
            assert!(steady_state_gap($name) <= 1e-4);
        }
    };
}

steady_state_test!(example1_reaches_steady_state, "example1");
steady_state_test!(example2_reaches_steady_state, "example2");
steady_state_test!(example3_reaches_steady_state, "example3");
steady_state_test!(example4_reaches_steady_state, "example4");
steady_state_test!(example5_reaches_steady_state, "example5");
steady_state_test!(example6_reaches_steady_state, "example6");
