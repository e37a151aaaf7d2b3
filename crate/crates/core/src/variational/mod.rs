//! Boué–Dupuis drifts, partition-function bounds and the focusing witness.

mod drift;
mod objective;
mod witness;

pub use drift::{build_adapted, i_theta, DriftPath, Past};
pub use objective::{
    bd_objective, feedback_objective, free_energy_direct, optimize_drift, DriftPolicy, FeedbackDrift, Functional, OptConfig, OptimizedDrift, Optimizer,
};
pub use witness::{
    build_f_m, bump_normalization, bump_profile, fit_exponents, phase_scan_beta2, q_f_m, sample_cutoff_statistic, sample_theta0, sample_witness,
    witness_certificate, witness_drift, PhaseRow, PhaseScan, Theta0Samples, WitnessExponents, WitnessReport, WitnessSamples,
};
