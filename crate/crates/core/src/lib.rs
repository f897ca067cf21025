//! Knapsack-encoded portfolio selection solved with a quantum-walk-mixer QAOA
//! on an exact statevector simulator.
//!
//! The pipeline runs from prices to expected returns ([`portfolio`]), to a
//! unit-weight knapsack ([`knapsack`]), to a circuit built from a QFT
//! feasibility oracle ([`oracle`]) and a feasibility-gated walk mixer
//! ([`mixer`]) simulated by [`sim`]. [`driver`] searches the angles and
//! reports approximation ratios against the exact classical optimum.

pub mod driver;
pub mod error;
pub mod fixtures;
pub mod knapsack;
pub mod mixer;
pub mod optim;
pub mod oracle;
pub mod portfolio;
pub mod sector;
pub mod sim;

pub use driver::{
    evolve, expectation, optimize, run, Backend, OptimizeOptions, QaoaSchedule, RunConfig,
    RunReport,
};
pub use error::{Error, Result};
pub use knapsack::{
    approximation_ratio, is_feasible, solve_brute_force, solve_dp, total_value, total_weight,
    BitString, BksSolution, KnapsackInstance,
};
pub use oracle::{derive_oracle_params, OracleParams};
pub use sim::{choice_distribution, init_state, Gate1, RegisterLayout, StateVector};
