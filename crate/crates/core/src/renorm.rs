//! Renormalization constants as exact lattice sums.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields;
use crate::lattice::{self, Mode, Shape};
use crate::parallel::par_map;
use crate::spectral::{self, FourierField};
use crate::stats::{self, Estimate};

/// Coupling constants of the Hartree interaction and the taming term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    pub beta: f64,
    pub sigma: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

fn default_gamma() -> f64 {
    3.0
}

impl PotentialParams {
    pub fn defocusing(beta: f64) -> Self {
        Self { beta, sigma: -1.0, a: 0.0, gamma: 3.0 }
    }
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(Error::Config(format!("beta must be positive, got {}", self.beta)));
        }
        if self.a < 0.0 {
            return Err(Error::Config(format!("taming amplitude A must be nonnegative, got {}", self.a)));
        }
        Ok(())
    }
    /// Additional check for the focusing construction: `max((β+1)/(β−1), 2) ≤ γ ≤ 3`.
    pub fn validate_focusing(&self) -> Result<()> {
        self.validate()?;
        if self.beta <= 1.0 {
            return Err(Error::Config("the focusing construction needs beta > 1".into()));
        }
        let lo = ((self.beta + 1.0) / (self.beta - 1.0)).max(2.0);
        if self.gamma < lo || self.gamma > 3.0 {
            return Err(Error::Config(format!("gamma must lie in [{lo}, 3], got {}", self.gamma)));
        }
        Ok(())
    }
}

/// `V̂(n) = ⟨n⟩^{-β}`.
#[inline]
pub fn bessel_symbol(n: Mode, beta: f64) -> f64 {
    lattice::bracket_sq(n).powf(-0.5 * beta)
}

/// Symbol of `V₀ = V − V̂(0)`.
#[inline]
pub fn bessel0_symbol(n: Mode, beta: f64) -> f64 {
    if lattice::is_zero(n) {
        0.0
    } else {
        bessel_symbol(n, beta)
    }
}

pub fn apply_v(u: &FourierField, beta: f64) -> FourierField {
    u.multiplier(|n| bessel_symbol(n, beta))
}

pub fn apply_v0(u: &FourierField, beta: f64) -> FourierField {
    u.multiplier(|n| bessel0_symbol(n, beta))
}

/// `σ_N = Σ_{|n|≤N} ⟨n⟩^{-2}`.
pub fn sigma_n(n: usize, shape: Shape) -> f64 {
    lattice::modes(n, shape).into_iter().map(|m| 1.0 / lattice::bracket_sq(m)).sum()
}

/// `h(n) = 𝟙_{|n|≤N}⟨n⟩^{-2}`.
pub fn free_covariance(n: usize, shape: Shape) -> FourierField {
    FourierField::from_symbol(n, shape, |m| 1.0 / lattice::bracket_sq(m))
}

/// `α_N = Σ_{n₁+n₂≠0} V̂(n₁+n₂)⟨n₁⟩^{-2}⟨n₂⟩^{-2}` via the autocorrelation of `h`.
pub fn alpha_n(n: usize, beta: f64, shape: Shape) -> Result<f64> {
    let h = free_covariance(n, shape);
    let hh = spectral::square(&h)?;
    Ok(hh.iter().map(|(k, v)| bessel0_symbol(k, beta) * v.re).sum())
}

/// `κ_N(n) = Σ_{|n₁|≤N, n₁≠−n} V̂(n+n₁)⟨n₁⟩^{-2}` for `|n| ≤ N`.
pub fn kappa_n(n: usize, beta: f64, shape: Shape) -> Result<FourierField> {
    let h = free_covariance(n, shape);
    let v = FourierField::from_symbol(2 * n, shape, |m| bessel_symbol(m, beta));
    let mut k = spectral::multiply_to(&v, &h, n, shape)?;
    k.fill_with(|m, z| spectral::C64::new(z.re - 1.0 / lattice::bracket_sq(m), 0.0));
    Ok(k)
}

/// `A_N = Σ_{|n|≤N}⟨n⟩^{-2β-2}` and `B_N = (log N)^{-1/4} A_N^{-1/2}`.
pub fn singularity_constants(n: usize, beta: f64, shape: Shape) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::Config("A_N and B_N need N >= 2".into()));
    }
    if !(beta > 0.0 && beta <= 0.5) {
        return Err(Error::Config(format!("A_N and B_N are defined for 0 < beta <= 1/2, got {beta}")));
    }
    Ok(singularity_formula(n, beta, shape))
}

fn singularity_formula(n: usize, beta: f64, shape: Shape) -> (f64, f64) {
    let a: f64 = lattice::modes(n, shape).into_iter().map(|m| lattice::bracket_sq(m).powf(-beta - 1.0)).sum();
    let b = (n as f64).ln().powf(-0.25) / a.sqrt();
    (a, b)
}

/// Every constant for one `(N, β)`.
#[derive(Clone, Debug, Serialize)]
pub struct RenormTable {
    pub n: usize,
    pub beta: f64,
    pub shape: Shape,
    pub sigma_n: f64,
    pub alpha_n: f64,
    #[serde(skip)]
    pub kappa: FourierField,
    pub a_n: Option<f64>,
    pub b_n: Option<f64>,
    pub c_n: Option<Estimate>,
}

impl RenormTable {
    pub fn new(n: usize, beta: f64, shape: Shape) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Config(format!("beta must be positive, got {beta}")));
        }
        let (a_n, b_n) = if n >= 2 {
            let (a, b) = singularity_formula(n, beta, shape);
            (Some(a), Some(b))
        } else {
            (None, None)
        };
        Ok(Self {
            n,
            beta,
            shape,
            sigma_n: sigma_n(n, shape),
            alpha_n: alpha_n(n, beta, shape)?,
            kappa: kappa_n(n, beta, shape)?,
            a_n,
            b_n,
            c_n: None,
        })
    }

    pub fn ball(n: usize, beta: f64) -> Result<Self> {
        Self::new(n, beta, Shape::Ball)
    }

    pub fn with_c_n(mut self, c: Estimate) -> Self {
        self.c_n = Some(c);
        self
    }

    #[inline]
    pub fn kappa_at(&self, m: Mode) -> f64 {
        self.kappa.get(m).re
    }

    /// `(n, κ_N(n))` in lexicographic order.
    pub fn kappa_rows(&self) -> Vec<(Mode, f64)> {
        self.kappa.iter().map(|(m, v)| (m, v.re)).collect()
    }
}

/// Trapezoid weights on `t_k = k/K`, `k = 0..=K`.
pub fn trapezoid_weights(steps: usize) -> Vec<f64> {
    let h = 1.0 / steps as f64;
    (0..=steps).map(|k| if k == 0 || k == steps { 0.5 * h } else { h }).collect()
}

/// `G_N(t) = π_N[(V₀∗Y²)Y] − 2tκ_N Y`, so that `Ż^N = ⟨∇⟩^{-2}G_N`.
pub fn drift_force(y: &FourierField, t: f64, table: &RenormTable) -> Result<FourierField> {
    let n = table.n;
    let yn = y.project(n);
    let s = apply_v0(&spectral::square(&yn)?, table.beta);
    let mut g = spectral::multiply_to(&s, &yn, n, table.shape)?;
    g.fill_with(|m, v| v - yn.get(m) * (2.0 * t * table.kappa_at(m)));
    Ok(g)
}

/// `‖Ż^N(t)‖²_{H¹} = Σ⟨n⟩^{-2}|Ĝ_N(n,t)|²`.
fn drift_energy(g: &FourierField) -> f64 {
    g.sobolev_sq(-1.0)
}

/// Monte Carlo estimate of `C_N = ½𝔼∫₀¹‖Ż^N(t)‖²_{H¹}dt` over `paths` Wiener paths.
pub fn c_n(table: &RenormTable, paths: usize, timesteps: usize, seed: u64) -> Result<Estimate> {
    if paths < 2 || timesteps < 1 {
        return Err(Error::Config("C_N needs at least two paths and one time step".into()));
    }
    let w = trapezoid_weights(timesteps);
    let values: Vec<Result<f64>> = par_map(paths, |p| {
        let path = fields::sample_y_path(table.n, table.shape, timesteps, seed, p as u64)?;
        let ys = path.y_all();
        let mut acc = 0.0;
        for (k, y) in ys.iter().enumerate().skip(1) {
            let t = k as f64 / timesteps as f64;
            acc += w[k] * drift_energy(&drift_force(y, t, table)?);
        }
        Ok(0.5 * acc)
    });
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    let est = stats::mean_se(&values);
    if est.se > 0.1 * est.value.abs() {
        return Err(Error::Numerical(format!(
            "C_N standard error {:.3e} exceeds 10% of the estimate {:.3e}",
            est.se, est.value
        )));
    }
    Ok(est)
}

/// `∫₀¹ t³ dt` by the same rule as [`c_n`]; `None` gives the exact value ¼.
pub fn cubic_time_factor(timesteps: Option<usize>) -> f64 {
    match timesteps {
        None => 0.25,
        Some(k) => trapezoid_weights(k).iter().enumerate().map(|(i, w)| w * (i as f64 / k as f64).powi(3)).sum(),
    }
}

/// `C_N` from the Wick contraction sum
/// `𝔼|Ĝ(n,t)|² = 6t³ Σ_{a₁+a₂+a₃=n} f_s(a)² Π⟨aᵢ⟩^{-2}`
/// with `f_s` the symmetrization of `V̂₀(a₁+a₂)`, using cubic lattice symmetry in `n`.
pub fn c_n_exact(n: usize, beta: f64, shape: Shape, timesteps: Option<usize>) -> f64 {
    let modes = lattice::modes(n, shape);
    let w: Vec<f64> = modes.iter().map(|&m| 1.0 / lattice::bracket_sq(m)).collect();
    let r = 2 * n as i32;
    let side = (2 * r + 1) as usize;
    let mut v0 = vec![0.0; side * side * side];
    let idx = |m: Mode| (((m[0] + r) as usize) * side + (m[1] + r) as usize) * side + (m[2] + r) as usize;
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                v0[idx([a, b, c])] = bessel0_symbol([a, b, c], beta);
            }
        }
    }
    let mut total = 0.0;
    for rep in orbit_representatives(n, shape) {
        let mut s = 0.0;
        for (i, &a1) in modes.iter().enumerate() {
            for (j, &a2) in modes.iter().enumerate() {
                let a3 = lattice::sub(lattice::sub(rep, a1), a2);
                if !shape.contains(a3, n) {
                    continue;
                }
                let f = (v0[idx(lattice::add(a1, a2))] + v0[idx(lattice::add(a1, a3))] + v0[idx(lattice::add(a2, a3))]) / 3.0;
                s += f * f * w[i] * w[j] / lattice::bracket_sq(a3);
            }
        }
        total += orbit_size(rep) as f64 * 6.0 * s / lattice::bracket_sq(rep);
    }
    0.5 * cubic_time_factor(timesteps) * total
}

fn orbit_representatives(n: usize, shape: Shape) -> Vec<Mode> {
    let r = n as i32;
    let mut out = Vec::new();
    for a in 0..=r {
        for b in a..=r {
            for c in b..=r {
                if shape.contains([a, b, c], n) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

/// Size of the orbit of `0 ≤ a ≤ b ≤ c` under coordinate permutations and sign flips.
fn orbit_size(m: Mode) -> usize {
    let signs = 1usize << m.iter().filter(|&&x| x != 0).count();
    let perms = if m[0] == m[1] && m[1] == m[2] {
        1
    } else if m[0] == m[1] || m[1] == m[2] {
        3
    } else {
        6
    };
    signs * perms
}
