//! Walk-or-wait decisions for a traveler on a bus route with random bus
//! arrivals.
//!
//! The traveler stands at the first stop of a route and can walk or wait.
//! [`arrival`] models when the next bus comes, [`decision`] solves the
//! two-stop problem (including the wait threshold at which waiting and
//! walking break even, and arrival deadlines), [`route`] extends it to many
//! stops, and [`sim`] checks everything by simulation and quadrature.
//!
//! Units: hours, miles, miles per hour.
#![no_std]

extern crate alloc;

pub mod arrival;
pub mod decision;
pub mod error;
pub mod route;
pub mod sim;

pub use arrival::{ArrivalDistribution, SupportHorizon};
pub use decision::{
    clamp_deadline, expected_travel_time, indifference_residual, solve_wait_threshold,
    solve_wait_threshold_with_diagnostics, threshold_expected_time, uniform_closed_form_t_w,
    walk_decision_deterministic, DeadlinedSolution, Decision, SolverDiagnostics, TravelerProfile, WaitSolution,
};
pub use error::{Error, Result};
pub use route::{
    laziness_check, plan_route, stop_decision, substitution_residual, validate_route, LazinessEntry, RouteSpec,
    WaitPolicy,
};
pub use sim::{
    compare_strategies, oracle_expected_time, paired_difference, simulate_strategy, Simulation, SimulationReport,
    Strategy,
};
