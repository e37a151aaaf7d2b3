//! Mode-wise damped oscillator `ẍ + ẋ + ⟨n⟩²x = √2 Ḃ` and its exact Gaussian update.

use serde::{Deserialize, Serialize};

use crate::lattice::{self, Mode, Shape};
use crate::rng::{self, purpose, ModeStreams, StreamKey};
use crate::spectral::{FourierField, C64};

pub type Mat2 = [[f64; 2]; 2];

/// `(Ψ, ∂ₜΨ)` at model time `time`.
#[derive(Clone, Debug, PartialEq)]
pub struct WavePair {
    pub pos: FourierField,
    pub vel: FourierField,
    pub time: f64,
}

impl WavePair {
    pub fn zeros(cutoff: usize, shape: Shape) -> Self {
        Self {
            pos: FourierField::zeros(cutoff, shape, true),
            vel: FourierField::zeros(cutoff, shape, true),
            time: 0.0,
        }
    }
    pub fn cutoff(&self) -> usize {
        self.pos.cutoff()
    }
    pub fn shape(&self) -> Shape {
        self.pos.shape()
    }
}

/// A draw from `μ₁ ⊗ μ₀`, the invariant law of the linear equation.
pub fn stationary_pair(cutoff: usize, shape: Shape, seed: u64, replica: u64) -> WavePair {
    let pos = rng::gaussian_field(cutoff, shape, StreamKey::new(seed, replica, purpose::INIT_POS), |n| {
        1.0 / lattice::bracket(n)
    });
    let vel = rng::gaussian_field(cutoff, shape, StreamKey::new(seed, replica, purpose::INIT_VEL), |_| 1.0);
    WavePair { pos, vel, time: 0.0 }
}

/// `⟪n⟫`.
#[inline]
pub fn damped_frequency(n: Mode) -> f64 {
    lattice::wave_bracket(n)
}

/// Solution map of the damped mode equation over time `t` in `(x, ẋ)` coordinates.
pub fn damped_propagator(t: f64, n: Mode) -> Mat2 {
    damped_matrix(lattice::bracket_sq(n), t)
}

fn damped_matrix(lambda: f64, t: f64) -> Mat2 {
    let w = (lambda - 0.25).sqrt();
    let e = (-0.5 * t).exp();
    let (s, c) = (w * t).sin_cos();
    [[e * (c + s / (2.0 * w)), e * s / w], [-e * lambda * s / w, e * (c - s / (2.0 * w))]]
}

fn undamped_matrix(lambda: f64, t: f64) -> Mat2 {
    let w = lambda.sqrt();
    let (s, c) = (w * t).sin_cos();
    [[c, s / w], [-w * s, c]]
}

/// `D̂ₙ(t) = e^{-t/2} sin(t⟪n⟫)/⟪n⟫`.
#[inline]
pub fn d_hat(t: f64, n: Mode) -> f64 {
    let w = damped_frequency(n);
    (-0.5 * t).exp() * (t * w).sin() / w
}

/// `σₙ(t₁, t₂) = e^{-|t₁−t₂|/2}⟨n⟩^{-2}(cos(|t₁−t₂|⟪n⟫) + sin(|t₁−t₂|⟪n⟫)/(2⟪n⟫))`.
pub fn sigma_cov(n: Mode, t1: f64, t2: f64) -> f64 {
    let tau = (t1 - t2).abs();
    let w = damped_frequency(n);
    (-0.5 * tau).exp() / lattice::bracket_sq(n) * ((tau * w).cos() + (tau * w).sin() / (2.0 * w))
}

/// Wick pairing
/// `𝔼[(Ψ(n₁,t₁)Ψ(n₂,t₁′) − 𝟙σ) conj(Ψ(n₁′,t₂)Ψ(n₂′,t₂′) − 𝟙σ)]`
/// for the stationary stochastic convolution.
#[allow(clippy::too_many_arguments)]
pub fn wick_pair_covariance(n1: Mode, n2: Mode, n1p: Mode, n2p: Mode, t1: f64, t1p: f64, t2: f64, t2p: f64) -> f64 {
    let mut v = 0.0;
    if n1 == n1p && n2 == n2p {
        v += sigma_cov(n1, t1, t2) * sigma_cov(n2, t1p, t2p);
    }
    if n1 == n2p && n2 == n1p {
        v += sigma_cov(n1, t1, t2p) * sigma_cov(n2, t1p, t2);
    }
    v
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearConfig {
    pub damping: bool,
    pub noise: bool,
}

impl Default for LinearConfig {
    fn default() -> Self {
        Self { damping: true, noise: true }
    }
}

#[derive(Clone, Copy, Debug)]
struct ModeStep {
    m: Mat2,
    chol: Mat2,
}

/// Exact-in-law linear update over a fixed step, cached per `|n|²`.
#[derive(Clone, Debug)]
pub struct LinearStepper {
    h: f64,
    cfg: LinearConfig,
    steps: Vec<ModeStep>,
}

impl LinearStepper {
    pub fn new(cutoff: usize, h: f64, cfg: LinearConfig) -> Self {
        let max = 3 * cutoff * cutoff;
        let steps = (0..=max)
            .map(|k2| {
                let lambda = 1.0 + k2 as f64;
                let m = if cfg.damping { damped_matrix(lambda, h) } else { undamped_matrix(lambda, h) };
                let chol = if cfg.noise && cfg.damping { noise_factor(&m, lambda) } else { [[0.0; 2]; 2] };
                ModeStep { m, chol }
            })
            .collect();
        Self { h, cfg, steps }
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Mean propagator and lower Cholesky factor of the step covariance for mode `n`.
    pub fn mode_matrices(&self, n: Mode) -> (Mat2, Mat2) {
        let s = &self.steps[lattice::norm_sq(n) as usize];
        (s.m, s.chol)
    }

    /// Advances every mode owned by `streams` by one step; other modes are left untouched.
    pub fn step(&self, state: &mut WavePair, streams: &mut ModeStreams) {
        for (n, r) in streams.iter_mut() {
            let s = &self.steps[lattice::norm_sq(n) as usize];
            let x = state.pos.get(n);
            let v = state.vel.get(n);
            let mut nx = x * s.m[0][0] + v * s.m[0][1];
            let mut nv = x * s.m[1][0] + v * s.m[1][1];
            if self.cfg.noise {
                let zero = lattice::is_zero(n);
                let g1: C64 = rng::complex_normal(r, zero);
                let g2: C64 = rng::complex_normal(r, zero);
                nx += g1 * s.chol[0][0];
                nv += g1 * s.chol[1][0] + g2 * s.chol[1][1];
            }
            state.pos.set_pair(n, nx);
            state.vel.set_pair(n, nv);
        }
        state.time += self.h;
    }
}

/// Cholesky factor of `Σ_∞ − MΣ_∞Mᵀ` with `Σ_∞ = diag(λ^{-1}, 1)`.
fn noise_factor(m: &Mat2, lambda: f64) -> Mat2 {
    let d = [1.0 / lambda, 1.0];
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let prop: f64 = (0..2).map(|k| m[i][k] * d[k] * m[j][k]).sum();
            c[i][j] = if i == j { d[i] - prop } else { -prop };
        }
    }
    let l11 = c[0][0].max(0.0).sqrt();
    let l21 = if l11 > 0.0 { c[1][0] / l11 } else { 0.0 };
    let l22 = (c[1][1] - l21 * l21).max(0.0).sqrt();
    [[l11, 0.0], [l21, l22]]
}

/// One exact step of the linear stochastic wave equation with fresh streams keyed by `key`.
pub fn stoch_convolution_step(state: &WavePair, h: f64, key: StreamKey) -> WavePair {
    let stepper = LinearStepper::new(state.cutoff(), h, LinearConfig::default());
    let mut streams = ModeStreams::new(state.cutoff(), state.shape(), key);
    let mut out = state.clone();
    stepper.step(&mut out, &mut streams);
    out
}

/// Step covariance `Σ_∞ − MΣ_∞Mᵀ` (for tests and diagnostics).
pub fn step_covariance(n: Mode, h: f64) -> Mat2 {
    let lambda = lattice::bracket_sq(n);
    let m = damped_matrix(lambda, h);
    let l = noise_factor(&m, lambda);
    [
        [l[0][0] * l[0][0], l[0][0] * l[1][0]],
        [l[1][0] * l[0][0], l[1][0] * l[1][0] + l[1][1] * l[1][1]],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_at_zero() {
        let m = damped_propagator(0.0, [3, 1, 0]);
        assert_eq!(m, [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(d_hat(0.0, [2, 0, 0]), 0.0);
    }

    #[test]
    fn semigroup() {
        let n = [2, -1, 1];
        let a = damped_propagator(0.3, n);
        let b = damped_propagator(0.45, n);
        let ab = damped_propagator(0.75, n);
        for i in 0..2 {
            for j in 0..2 {
                let p = a[i][0] * b[0][j] + a[i][1] * b[1][j];
                assert!((p - ab[i][j]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sigma_equal_times() {
        let n = [1, 2, 2];
        assert!((sigma_cov(n, 0.7, 0.7) - 0.1).abs() < 1e-15);
    }
}
