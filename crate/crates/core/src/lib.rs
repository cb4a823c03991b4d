//! Sampling-based set cover and hypergraph matching, with Monte Carlo checks
//! of the underlying sampling process and a logical MPC simulator.

pub mod cover;
pub mod instance;
pub mod matching;
pub mod mpc;
pub mod oracle;
pub mod schedule;
pub mod ssp;
pub mod stats;
pub mod trials;
