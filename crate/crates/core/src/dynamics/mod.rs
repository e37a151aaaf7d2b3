//! Truncated wave and heat dynamics, a MALA reference sampler for the truncated
//! Gibbs measure, and the invariance harness comparing the two.

pub mod integrators;
pub mod invariance;
pub mod mala;

pub use integrators::{evolve_sdnlw, evolve_snlh, hamiltonian, IntegratorConfig, Scheme};
pub use invariance::{invariance_test, InvarianceConfig, InvarianceReport, StatComparison, Verdict};
pub use mala::{gibbs_reference, MalaPoint, MalaTarget, McmcConfig, McmcRun};
