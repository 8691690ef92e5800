//! Solver for stationary Markov-perfect Nash equilibria of a multiregional
//! transboundary-pollution game whose stock diffuses and drifts over a 2D
//! domain.
//!
//! The pipeline is: build the grid and player regions, assemble the discrete
//! generator and its adjoint, solve one elliptic problem per player for the
//! value-gradient field, form the equilibrium emission fields, the value
//! constants and the steady-state stock, and (optionally) validate the whole
//! construction with a time-domain simulation of the controlled dynamics.

pub mod assembly;
pub mod equilibrium;
pub mod error;
pub mod field;
pub mod geometry;
pub mod linsolve;
pub mod output;
pub mod scenario;
pub mod simulation;
pub mod sparse;
pub mod verify;

pub use assembly::{
    assemble_adjoint, assemble_adjoint_direct, assemble_primal, indicator_load, Coef,
    Coefficients, OperatorKind, SparseOperator,
};
pub use equilibrium::{
    compute_w, emissions_from_value, solve_equilibrium, solve_player_value,
    steady_state_pollution, value_function, EquilibriumSolution,
};
pub use error::{Error, Result};
pub use field::Field;
pub use geometry::{
    sample_convection, BcSide, BoundarySpec, ConvectionField, ConvectionPiece, Grid, HalfPlane,
    Rect, RegionPartition, SampledConvection,
};
pub use linsolve::{solve, solve_matrix, step_implicit, ImplicitStepper, Method, SolveReport};
pub use scenario::{BuiltScenario, Scenario};
pub use simulation::{
    deviation_payoff, discounted_payoff, simulate, simulate_observed, DiscountedPayoff,
    Trajectory,
};
