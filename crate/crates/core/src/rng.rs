//! Counter-based random streams keyed by `(seed, replica, purpose, step, mode)`.
//!
//! Every frequency owns its own ChaCha stream, so enlarging the cutoff adds
//! new independent coefficients without disturbing the existing ones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::lattice::{self, Mode, Shape};
use crate::spectral::{FourierField, C64};

pub mod purpose {
    pub const MU: u64 = 1;
    pub const WIENER: u64 = 2;
    pub const INIT_POS: u64 = 3;
    pub const INIT_VEL: u64 = 4;
    pub const WAVE_NOISE: u64 = 5;
    pub const HEAT_NOISE: u64 = 6;
    pub const MALA: u64 = 7;
    pub const SCALAR: u64 = 8;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub replica: u64,
    pub purpose: u64,
    pub step: u64,
}

impl StreamKey {
    pub fn new(seed: u64, replica: u64, purpose: u64) -> Self {
        Self { seed, replica, purpose, step: 0 }
    }
    pub fn at_step(self, step: u64) -> Self {
        Self { step, ..self }
    }
    fn seed_bytes(&self) -> [u8; 32] {
        let mut s = [0u8; 32];
        s[0..8].copy_from_slice(&self.seed.to_le_bytes());
        s[8..16].copy_from_slice(&self.replica.to_le_bytes());
        s[16..24].copy_from_slice(&self.purpose.to_le_bytes());
        s[24..32].copy_from_slice(&self.step.to_le_bytes());
        s
    }
}

/// Stream for frequency `n`.
pub fn mode_stream(key: StreamKey, n: Mode) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(key.seed_bytes());
    rng.set_stream(lattice::mode_key(n));
    rng
}

/// Stream not tied to a frequency (acceptance draws, shuffles, ...).
pub fn scalar_stream(key: StreamKey) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(key.seed_bytes());
    rng.set_stream(u64::MAX);
    rng
}

#[inline]
pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Standard Gaussian with `E|g|² = 1`: real at the zero frequency, otherwise
/// with independent real and imaginary parts of variance ½.
#[inline]
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R, zero_mode: bool) -> C64 {
    if zero_mode {
        C64::new(normal(rng), 0.0)
    } else {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        C64::new(s * normal(rng), s * normal(rng))
    }
}

/// Real Gaussian field with `E|û(n)|² = std(n)²` on `shape(cutoff)`.
pub fn gaussian_field(cutoff: usize, shape: Shape, key: StreamKey, mut std: impl FnMut(Mode) -> f64) -> FourierField {
    let mut u = FourierField::zeros(cutoff, shape, true);
    for n in lattice::half_modes(cutoff, shape) {
        let mut rng = mode_stream(key, n);
        let g = complex_normal(&mut rng, lattice::is_zero(n));
        u.set_pair(n, g * std(n));
    }
    u
}

/// One persistent stream per frequency of Λ₀ ∩ shape(cutoff), drawn sequentially.
#[derive(Clone, Debug)]
pub struct ModeStreams {
    modes: Vec<Mode>,
    rngs: Vec<ChaCha8Rng>,
}

impl ModeStreams {
    pub fn new(cutoff: usize, shape: Shape, key: StreamKey) -> Self {
        let modes = lattice::half_modes(cutoff, shape);
        let rngs = modes.iter().map(|&n| mode_stream(key, n)).collect();
        Self { modes, rngs }
    }
    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }
    pub fn iter_mut(&mut self) -> impl Iterator<Item = (Mode, &mut ChaCha8Rng)> {
        self.modes.iter().copied().zip(self.rngs.iter_mut())
    }
}
