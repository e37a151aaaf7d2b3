//! Gaussian ensembles: free fields, Wiener paths of `Y(t) = ⟨∇⟩^{-1}W(t)`,
//! Wick squares and the random inputs of the non-normalizability witness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, Shape};
use crate::renorm::{self, RenormTable};
use crate::rng::{self, purpose, StreamKey};
use crate::spectral::{self, FourierField};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub cutoff: usize,
    /// Regularity `s`: mode variances are `⟨n⟩^{-2s}`.
    pub s: f64,
    pub seed: u64,
    #[serde(default)]
    pub replica: u64,
    #[serde(default)]
    pub shape: Shape,
}

impl GaussianSpec {
    pub fn new(cutoff: usize, s: f64, seed: u64) -> Self {
        Self { cutoff, s, seed, replica: 0, shape: Shape::Ball }
    }
    pub fn replica(self, replica: u64) -> Self {
        Self { replica, ..self }
    }
}

/// A draw from `μ_s` truncated to `shape(N)`.
pub fn sample_mu(spec: &GaussianSpec) -> FourierField {
    let key = StreamKey::new(spec.seed, spec.replica, purpose::MU);
    let s = spec.s;
    rng::gaussian_field(spec.cutoff, spec.shape, key, |n| lattice::bracket_sq(n).powf(-0.5 * s))
}

/// `:u_N²: = (π_N u)² − σ_N`.
pub fn wick_square(u: &FourierField, table: &RenormTable) -> Result<FourierField> {
    wick_square_with(u, table.n, table.sigma_n)
}

pub fn wick_square_with(u: &FourierField, n: usize, sigma: f64) -> Result<FourierField> {
    let un = u.project(n);
    let mut w = spectral::square(&un)?;
    w.add_constant(-sigma);
    Ok(w)
}

/// Brownian increments `ΔB_n` on a uniform grid of `[0, 1]`; `Y = ⟨∇⟩^{-1}B`.
#[derive(Clone, Debug)]
pub struct WienerPath {
    cutoff: usize,
    shape: Shape,
    increments: Vec<FourierField>,
}

impl WienerPath {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }
    pub fn shape(&self) -> Shape {
        self.shape
    }
    pub fn steps(&self) -> usize {
        self.increments.len()
    }
    pub fn dt(&self) -> f64 {
        1.0 / self.steps() as f64
    }
    pub fn times(&self) -> Vec<f64> {
        (0..=self.steps()).map(|k| k as f64 * self.dt()).collect()
    }
    /// `ΔB` over `[t_k, t_{k+1})`.
    pub fn increment(&self, k: usize) -> &FourierField {
        &self.increments[k]
    }
    /// `B(t_k)`.
    pub fn brownian(&self, k: usize) -> FourierField {
        let mut b = FourierField::zeros(self.cutoff, self.shape, true);
        for inc in &self.increments[..k] {
            b = b.add(inc);
        }
        b
    }
    /// `Y(t_k)`.
    pub fn y(&self, k: usize) -> FourierField {
        self.brownian(k).multiplier(|n| 1.0 / lattice::bracket(n))
    }
    /// `Y(t_0), …, Y(t_K)`.
    pub fn y_all(&self) -> Vec<FourierField> {
        let mut out = Vec::with_capacity(self.steps() + 1);
        let mut b = FourierField::zeros(self.cutoff, self.shape, true);
        out.push(b.clone());
        for inc in &self.increments {
            b = b.add(inc);
            out.push(b.multiplier(|n| 1.0 / lattice::bracket(n)));
        }
        out
    }
    /// Index of time `t` on the grid, if it is a grid point.
    pub fn time_index(&self, t: f64) -> Option<usize> {
        let k = (t * self.steps() as f64).round();
        if (k / self.steps() as f64 - t).abs() < 1e-12 {
            Some(k as usize)
        } else {
            None
        }
    }
}

pub fn sample_y_path(cutoff: usize, shape: Shape, timesteps: usize, seed: u64, replica: u64) -> Result<WienerPath> {
    if timesteps < 1 {
        return Err(Error::Config("a Wiener path needs at least one step".into()));
    }
    let sd = (1.0 / timesteps as f64).sqrt();
    let key = StreamKey::new(seed, replica, purpose::WIENER);
    let increments = (0..timesteps)
        .map(|k| rng::gaussian_field(cutoff, shape, key.at_step(k as u64), |_| sd))
        .collect();
    Ok(WienerPath { cutoff, shape, increments })
}

/// `(Z_M, σ̃_M)` with `Z_M = π_M Y(½)` and `σ̃_M = ½σ_M`.
pub fn witness_randoms(path: &WienerPath, m: usize) -> Result<(FourierField, f64)> {
    if m > path.cutoff() {
        return Err(Error::Config(format!("M = {m} exceeds the path cutoff {}", path.cutoff())));
    }
    let k = path
        .time_index(0.5)
        .ok_or_else(|| Error::Config("the time grid must contain t = 1/2".into()))?;
    let z = path.y(k).project(m);
    Ok((z, 0.5 * renorm::sigma_n(m, path.shape())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wick_square_of_constant() {
        let u = FourierField::constant(3.0, Shape::Ball);
        let w = wick_square_with(&u, 4, 10.0).unwrap();
        assert!((w.zero_mode().re - (9.0 - 10.0)).abs() < 1e-12);
        assert!(w.norm_sq() - 1.0 < 1e-20);
    }

    #[test]
    fn path_refinement_is_deterministic() {
        let p = sample_y_path(3, Shape::Ball, 4, 5, 1).unwrap();
        let q = sample_y_path(3, Shape::Ball, 4, 5, 1).unwrap();
        assert_eq!(p.y(4), q.y(4));
        assert_eq!(p.y_all()[2], p.y(2));
    }
}
