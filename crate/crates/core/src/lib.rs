//! Spectral numerics for the Hartree Φ⁴₃ model on the 3-torus: renormalization
//! constants, Gaussian ensembles, renormalized energies, stochastic objects of
//! the damped wave equation, truncated dynamics and variational bounds.

pub mod dynamics;
pub mod energy;
pub mod error;
pub mod fields;
pub mod lattice;
pub mod parallel;
pub mod renorm;
pub mod rng;
pub mod spectral;
pub mod stats;
pub mod stochwave;
pub mod variational;

pub use error::{Error, Result};
pub use lattice::{Mode, Shape};
pub use renorm::{PotentialParams, RenormTable};
pub use spectral::{FourierField, C64};
pub use stats::Estimate;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
