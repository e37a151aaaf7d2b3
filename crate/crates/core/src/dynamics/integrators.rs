//! Truncated stochastic wave (Strang splitting) and heat (exponential Euler) flows.

use serde::{Deserialize, Serialize};

use crate::energy;
use crate::error::{Error, Result};
use crate::lattice;
use crate::renorm::{PotentialParams, RenormTable};
use crate::rng::{self, purpose, ModeStreams, StreamKey};
use crate::spectral::{FourierField, C64};
use crate::stochwave::{LinearConfig, LinearStepper, WavePair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    StrangSplit,
    ExponentialEuler,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub scheme: Scheme,
    pub h: f64,
    pub t_end: f64,
    pub noise: bool,
    pub damping: bool,
    /// Observe the state every this many steps.
    pub record_every: usize,
    /// Abort when the `H^{-1/2-ε} × H^{-3/2-ε}` norm squared exceeds this.
    pub blowup_bound: f64,
    /// Subtract `σ_N` in the Wick square of the force.
    pub renormalized: bool,
}

impl IntegratorConfig {
    pub fn wave(h: f64, t_end: f64) -> Self {
        Self {
            scheme: Scheme::StrangSplit,
            h,
            t_end,
            noise: true,
            damping: true,
            record_every: 10,
            blowup_bound: 1e12,
            renormalized: true,
        }
    }
    pub fn heat(h: f64, t_end: f64) -> Self {
        Self { scheme: Scheme::ExponentialEuler, ..Self::wave(h, t_end) }
    }
    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) || !(self.t_end >= self.h) {
            return Err(Error::Config(format!("need h > 0 and T >= h, got h = {}, T = {}", self.h, self.t_end)));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be positive".into()));
        }
        Ok(())
    }
    pub fn steps(&self) -> usize {
        (self.t_end / self.h).round() as usize
    }
}

const GUARD_EPS: f64 = 0.1;

fn guard(pos: &FourierField, vel: Option<&FourierField>, bound: f64, time: f64) -> Result<()> {
    let mut s = pos.sobolev_sq(-0.5 - GUARD_EPS);
    if let Some(v) = vel {
        s += v.sobolev_sq(-1.5 - GUARD_EPS);
    }
    if !s.is_finite() || s > bound {
        return Err(Error::Numerical(format!("blow-up guard tripped at t = {time:.6}: norm² = {s:.3e}")));
    }
    Ok(())
}

fn nonlinear_force(u: &FourierField, params: &PotentialParams, table: &RenormTable, renormalized: bool) -> Result<FourierField> {
    let shift = if renormalized { table.sigma_n } else { 0.0 };
    energy::force_with_sigma(u, params, table, shift)
}

fn is_linear(params: &PotentialParams) -> bool {
    params.sigma == 0.0 && params.a == 0.0
}

/// Truncated damped stochastic wave equation
/// `∂ₜ²u + ∂ₜu + (1−Δ)u = σπ_N((V∗:u_N²:)u_N) − M_γ(:u_N²:)u_N + √2ξ`.
/// Modes above `N` follow the linear equation. `observe` sees the state every
/// `record_every` steps.
pub fn evolve_sdnlw(
    init: &WavePair,
    params: &PotentialParams,
    table: &RenormTable,
    cfg: &IntegratorConfig,
    key: StreamKey,
    mut observe: impl FnMut(&WavePair) -> Result<()>,
) -> Result<WavePair> {
    cfg.validate()?;
    if init.cutoff() < table.n {
        return Err(Error::Config(format!("initial cutoff {} is below N = {}", init.cutoff(), table.n)));
    }
    let lin = LinearStepper::new(init.cutoff(), 0.5 * cfg.h, LinearConfig { damping: cfg.damping, noise: cfg.noise });
    let mut streams = ModeStreams::new(init.cutoff(), init.shape(), StreamKey { purpose: purpose::WAVE_NOISE, ..key });
    let mut state = init.clone();
    let t0 = state.time;
    let linear = is_linear(params);
    for k in 1..=cfg.steps() {
        lin.step(&mut state, &mut streams);
        if !linear {
            let f = nonlinear_force(&state.pos, params, table, cfg.renormalized)?;
            state.vel = state.vel.axpy(cfg.h, &f);
        }
        lin.step(&mut state, &mut streams);
        state.time = t0 + k as f64 * cfg.h;
        if k % cfg.record_every == 0 {
            guard(&state.pos, Some(&state.vel), cfg.blowup_bound, state.time)?;
            observe(&state)?;
        }
    }
    Ok(state)
}

/// Truncated parabolic flow `∂ₜu + (1−Δ)u = σπ_N((V∗:u_N²:)u_N) − M_γ(:u_N²:)u_N + √2ξ`
/// by exponential Euler with the exact Ornstein–Uhlenbeck noise.
pub fn evolve_snlh(
    init: &FourierField,
    params: &PotentialParams,
    table: &RenormTable,
    cfg: &IntegratorConfig,
    key: StreamKey,
    mut observe: impl FnMut(f64, &FourierField) -> Result<()>,
) -> Result<FourierField> {
    cfg.validate()?;
    if init.cutoff() < table.n {
        return Err(Error::Config(format!("initial cutoff {} is below N = {}", init.cutoff(), table.n)));
    }
    let h = cfg.h;
    let max = 3 * init.cutoff() * init.cutoff();
    let coef: Vec<(f64, f64, f64)> = (0..=max)
        .map(|k2| {
            let lambda = 1.0 + k2 as f64;
            let e = (-lambda * h).exp();
            let sd = if cfg.noise { ((1.0 - e * e) / lambda).sqrt() } else { 0.0 };
            (e, (1.0 - e) / lambda, sd)
        })
        .collect();
    let mut streams = ModeStreams::new(init.cutoff(), init.shape(), StreamKey { purpose: purpose::HEAT_NOISE, ..key });
    let mut u = init.clone();
    let linear = is_linear(params);
    for k in 1..=cfg.steps() {
        let f = if linear { None } else { Some(nonlinear_force(&u, params, table, cfg.renormalized)?) };
        let old = u.clone();
        for (n, r) in streams.iter_mut() {
            let (e, p1, sd) = coef[lattice::norm_sq(n) as usize];
            let mut v = old.get(n) * e;
            if let Some(f) = &f {
                v += f.get(n) * p1;
            }
            if cfg.noise {
                let g: C64 = rng::complex_normal(r, lattice::is_zero(n));
                v += g * sd;
            }
            u.set_pair(n, v);
        }
        if k % cfg.record_every == 0 {
            let t = k as f64 * h;
            guard(&u, None, cfg.blowup_bound, t)?;
            observe(t, &u)?;
        }
    }
    Ok(u)
}

/// `𝓔^♯_N(u, v) = ½‖u‖²_{H¹} + ½‖v‖²_{L²} − 𝓡_N(u)`.
pub fn hamiltonian(state: &WavePair, params: &PotentialParams, table: &RenormTable) -> Result<f64> {
    let kinetic = 0.5 * state.pos.sobolev_sq(1.0) + 0.5 * state.vel.norm_sq();
    let potential = if is_linear(params) { 0.0 } else { energy::script_r_n(&state.pos, params, table)? };
    Ok(kinetic - potential)
}
