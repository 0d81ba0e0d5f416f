//! Distance-graded differential privacy over networks.
//!
//! A data owner samples one trace of a lazy Markov jump process `{V_ε}` and
//! answers every recipient `j` with `u + V_{ε(d_j)}`, where `ε(d)` decreases
//! with graph distance. Each response is Laplace-distributed at its own level,
//! and because all responses are read from the same trace, a coalition learns
//! nothing beyond what its closest member already holds.

pub mod distributions;
pub mod error;
pub mod graph;
pub mod mechanism;
pub mod process;
pub mod rng;
pub mod simulator;
pub mod trials;
pub mod verify;

pub use error::{Error, Result};
pub use rng::RandomStream;
