//! Pseudo-random expander graphs built as Schreier graphs of `GL_k(F_q)`
//! acting on nonzero vectors, with spectral measurement, exact trace-method
//! bounds and a seeded Monte Carlo harness.

pub mod error;
pub mod field;
pub mod graph;
pub mod seed;
pub mod spectral;
pub mod census;
pub mod bounds;
pub mod experiments;

pub use error::{Error, Result};
