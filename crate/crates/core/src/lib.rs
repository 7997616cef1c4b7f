//! Radial ground states of a pair of coupled nonlinear Schrödinger equations
//! in three dimensions, found by minimizing the action over the Pohozaev
//! manifold.

pub mod config;
pub mod coupled;
pub mod energy;
pub mod error;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod nonlinearity;
pub mod scalar;
pub mod threshold;

pub use config::RunConfig;
pub use coupled::{
    certify, classify, solve_coupled, Baselines, GroundState, InitStrategy, Kind, SolveConfig,
};
pub use energy::{EnergyParams, EnergyReport};
pub use error::{Error, Result};
pub use grid::{Profile, RadialGrid, State};
pub use nonlinearity::Nonlinearity;
pub use scalar::{solve_scalar, ScalarGroundState, ShootingConfig};
pub use threshold::{bisect_beta0, compare_energies, sweep, SweepResult, SweepRow};
