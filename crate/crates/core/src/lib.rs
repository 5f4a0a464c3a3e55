//! Simulation of binomial-code nonadiabatic holonomic gates in the
//! ultrastrong-coupling regime of the quantum Rabi model.

pub mod analysis;
pub mod codes;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod ode;
pub mod pulse;
pub mod rabi;
pub mod runner;

pub use error::{Error, Result};
