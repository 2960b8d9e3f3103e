//! Min-cut capacity of weighted random graphs: an exact lower bound on
//! `Pr[λ(G) ≥ δ]`, Monte Carlo estimates of the same tail, and enumeration
//! oracles for small instances.

pub mod bound;
pub mod cli;
pub mod cutspace;
pub mod ensemble;
pub mod error;
pub mod mincut;
pub mod montecarlo;
pub mod numeric;
pub mod oracle;

pub use error::{Error, Result};
