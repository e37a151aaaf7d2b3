//! Metropolis-adjusted Langevin sampler for the truncated Gibbs measure
//! `dρ_N ∝ e^{𝓡_N(u)} dμ₁(u)` on the modes `|n| ≤ N`.
//!
//! Coordinates are whitened: `û(n) = ⟨n⟩^{-1}(z_re + i z_im)/√2` for `n ∈ Λ₀ \ {0}`
//! and `û(0) = z₀`, so that the reference measure is the standard Gaussian.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::energy;
use crate::error::{Error, Result};
use crate::lattice::{self, Mode};
use crate::renorm::{PotentialParams, RenormTable};
use crate::rng::{self, purpose, StreamKey};
use crate::spectral::{FourierField, C64};
use crate::stats;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub samples: usize,
    pub thin: usize,
    pub burn_in: usize,
    pub target_accept: f64,
    pub initial_step: f64,
    /// Largest tolerated integrated autocorrelation time, in thinned samples.
    pub tau_cap: f64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        Self { samples: 4000, thin: 10, burn_in: 5000, target_accept: 0.574, initial_step: 0.5, tau_cap: 200.0 }
    }
}

/// Log target in whitened coordinates with its gradient.
pub struct MalaTarget<'a> {
    params: &'a PotentialParams,
    table: &'a RenormTable,
    modes: Vec<Mode>,
}

#[derive(Clone, Debug)]
pub struct MalaPoint {
    pub z: Vec<f64>,
    pub log_density: f64,
    pub grad: Vec<f64>,
}

impl<'a> MalaTarget<'a> {
    pub fn new(params: &'a PotentialParams, table: &'a RenormTable) -> Self {
        Self { params, table, modes: lattice::half_modes(table.n, table.shape) }
    }

    pub fn dim(&self) -> usize {
        2 * self.modes.len() - 1
    }

    pub fn to_field(&self, z: &[f64]) -> FourierField {
        let mut u = FourierField::zeros(self.table.n, self.table.shape, true);
        let mut i = 0;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for &n in &self.modes {
            if lattice::is_zero(n) {
                u.set_pair(n, C64::new(z[i], 0.0));
                i += 1;
            } else {
                let b = s / lattice::bracket(n);
                u.set_pair(n, C64::new(z[i] * b, z[i + 1] * b));
                i += 2;
            }
        }
        u
    }

    pub fn from_field(&self, u: &FourierField) -> Vec<f64> {
        let mut z = Vec::with_capacity(self.dim());
        for &n in &self.modes {
            let v = u.get(n);
            if lattice::is_zero(n) {
                z.push(v.re);
            } else {
                let b = std::f64::consts::SQRT_2 * lattice::bracket(n);
                z.push(v.re * b);
                z.push(v.im * b);
            }
        }
        z
    }

    /// `ℓ(z) = 𝓡_N(u(z)) − ½|z|²` and `∇ℓ`.
    pub fn evaluate(&self, z: Vec<f64>) -> Result<MalaPoint> {
        let u = self.to_field(&z);
        let r = energy::script_r_n(&u, self.params, self.table)?;
        let f = energy::force(&u, self.params, self.table)?;
        let mut grad = Vec::with_capacity(z.len());
        let mut i = 0;
        for &n in &self.modes {
            let fv = f.get(n);
            if lattice::is_zero(n) {
                grad.push(fv.re - z[i]);
                i += 1;
            } else {
                let b = std::f64::consts::SQRT_2 / lattice::bracket(n);
                grad.push(b * fv.re - z[i]);
                grad.push(b * fv.im - z[i + 1]);
                i += 2;
            }
        }
        let log_density = r - 0.5 * z.iter().map(|x| x * x).sum::<f64>();
        Ok(MalaPoint { z, log_density, grad })
    }

    /// `log q(to | from)` up to a constant for step `eps`.
    fn log_proposal(to: &MalaPoint, from: &MalaPoint, eps: f64) -> f64 {
        let h = 0.5 * eps * eps;
        -to.z
            .iter()
            .zip(&from.z)
            .zip(&from.grad)
            .map(|((a, b), g)| (a - b - h * g).powi(2))
            .sum::<f64>()
            / (2.0 * eps * eps)
    }

    /// Log Metropolis–Hastings ratio for the move `from → to`.
    pub fn log_accept_ratio(from: &MalaPoint, to: &MalaPoint, eps: f64) -> f64 {
        to.log_density - from.log_density + Self::log_proposal(from, to, eps) - Self::log_proposal(to, from, eps)
    }

    pub fn propose(&self, from: &MalaPoint, eps: f64, rng: &mut ChaCha8Rng) -> Result<MalaPoint> {
        let h = 0.5 * eps * eps;
        let z = from.z.iter().zip(&from.grad).map(|(x, g)| x + h * g + eps * rng::normal(rng)).collect();
        self.evaluate(z)
    }
}

#[derive(Clone, Debug)]
pub struct McmcRun {
    pub samples: Vec<FourierField>,
    pub acceptance: f64,
    pub step: f64,
    /// Integrated autocorrelation time of the Wick mass, in thinned samples.
    pub tau_int: f64,
}

/// MALA chain targeting `ρ_N`, started from a `μ₁` draw; the step size is tuned
/// during burn-in towards the target acceptance.
pub fn gibbs_reference(params: &PotentialParams, table: &RenormTable, cfg: &McmcConfig, key: StreamKey) -> Result<McmcRun> {
    let target = MalaTarget::new(params, table);
    let mut rng = rng::scalar_stream(StreamKey { purpose: purpose::MALA, ..key });
    let z0: Vec<f64> = (0..target.dim()).map(|_| rng::normal(&mut rng)).collect();
    let mut cur = target.evaluate(z0)?;
    let mut log_eps = cfg.initial_step.ln();
    let mut window = (0usize, 0usize);
    let mut rounds = 0usize;
    let mut avg = (0.0, 0usize);
    for it in 0..cfg.burn_in {
        let eps = log_eps.exp();
        let prop = target.propose(&cur, eps, &mut rng)?;
        let la = MalaTarget::log_accept_ratio(&cur, &prop, eps);
        window.1 += 1;
        if rng.random::<f64>().ln() < la {
            cur = prop;
            window.0 += 1;
        }
        if (it + 1) % 50 == 0 {
            let rate = window.0 as f64 / window.1 as f64;
            rounds += 1;
            log_eps += 2.0 * (rate - cfg.target_accept) / (rounds as f64).powf(0.6);
            window = (0, 0);
            if 2 * (it + 1) > cfg.burn_in {
                avg = (avg.0 + log_eps, avg.1 + 1);
            }
        }
    }
    let eps = if avg.1 > 0 { (avg.0 / avg.1 as f64).exp() } else { log_eps.exp() };
    let mut samples = Vec::with_capacity(cfg.samples);
    let mut accepted = 0usize;
    let total = cfg.samples * cfg.thin.max(1);
    for it in 0..total {
        let prop = target.propose(&cur, eps, &mut rng)?;
        let la = MalaTarget::log_accept_ratio(&cur, &prop, eps);
        if rng.random::<f64>().ln() < la {
            cur = prop;
            accepted += 1;
        }
        if (it + 1) % cfg.thin.max(1) == 0 {
            samples.push(target.to_field(&cur.z));
        }
    }
    let masses: Vec<f64> = samples.iter().map(|u| energy::wick_mass(u, table)).collect();
    let tau_int = stats::autocorr_time(&masses);
    if tau_int > cfg.tau_cap {
        return Err(Error::Numerical(format!(
            "MALA is not mixing: integrated autocorrelation time {tau_int:.1} exceeds the cap {}",
            cfg.tau_cap
        )));
    }
    Ok(McmcRun { samples, acceptance: accepted as f64 / total as f64, step: eps, tau_int })
}
