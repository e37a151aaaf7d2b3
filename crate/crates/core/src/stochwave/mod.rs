//! Damped stochastic wave: exact linear propagation, Wick covariances and the
//! stochastic objects built from the stochastic convolution `Ψ`.

pub mod kernels;
pub mod objects;
pub mod propagator;

pub use kernels::{chi, counterterm, kernel_a, kernel_a_renormalized, kernel_counterterms, Counterterms, KernelOperator, Split};
pub use objects::{frak_a, psi_pair, resonant_object, resonant_sum, shell_means, PsiPair, ResonantContext, ResonantObject};
pub use propagator::{
    d_hat, damped_propagator, sigma_cov, stationary_pair, stoch_convolution_step, wick_pair_covariance, LinearConfig,
    LinearStepper, WavePair,
};
