//! Paracontrolled kernels `𝒜_{n,n₁}(t,t′)` and their deterministic counter-term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{self, Mode, Shape};
use crate::rng::{self, purpose, StreamKey};
use crate::spectral::lp::{self, phi, phi_near, resonant_weight};
use crate::spectral::{self, FourierField, ProductGrid, C64};

use super::objects::PsiPair;
use super::propagator::{d_hat, damped_frequency, sigma_cov};

/// Frequency split of the paracontrolled operator: `j ≤ θk + c₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Split {
    pub theta: f64,
    pub c0: f64,
}

impl Default for Split {
    fn default() -> Self {
        Self { theta: 0.2, c0: 0.0 }
    }
}

impl Split {
    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta <= 1.0) {
            return Err(Error::Config(format!("theta must lie in (0, 1], got {}", self.theta)));
        }
        Ok(())
    }
    #[inline]
    fn allows(&self, j: usize, k: usize) -> bool {
        j as f64 <= self.theta * k as f64 + self.c0
    }
}

/// `χ_θ(a, b) = Σ_{j ≤ θk + c₀} φ_j(a)φ_k(b)`.
pub fn chi(a: f64, b: f64, split: Split) -> f64 {
    let mut s = 0.0;
    for j in 0..=lp::max_block(a) + 1 {
        let pj = phi(j, a);
        if pj == 0.0 {
            continue;
        }
        for k in 0..=lp::max_block(b) + 1 {
            if split.allows(j, k) {
                s += pj * phi(k, b);
            }
        }
    }
    s
}

fn tau_of(t: f64, tp: f64) -> Result<f64> {
    if tp > t || tp < 0.0 {
        return Err(Error::Config(format!("need 0 <= t' <= t, got t = {t}, t' = {tp}")));
    }
    Ok(t - tp)
}

/// Raw kernel
/// `𝒜_{n,n₁} = Σ_{n₂+n₃=n−n₁} χ_θ(n₁,n₂) ω(|n₁+n₂|,|n₃|) D̂_{n₁+n₂}(τ) Ψ̂(n₂,t′)Ψ̂(n₃,t)`,
/// summed over the ensemble cutoff.
pub fn kernel_a(n: Mode, n1: Mode, pair: &PsiPair, split: Split) -> C64 {
    let psi_e = &pair.early;
    let psi_l = &pair.late;
    let mut acc = C64::new(0.0, 0.0);
    let rest = lattice::sub(n, n1);
    let a1 = lattice::norm(n1);
    for (n2, e) in psi_e.iter() {
        let n3 = lattice::sub(rest, n2);
        if !psi_l.contains(n3) {
            continue;
        }
        let p = lattice::add(n1, n2);
        let w = chi(a1, lattice::norm(n2), split) * resonant_weight(lattice::norm(p), lattice::norm(n3));
        if w == 0.0 {
            continue;
        }
        acc += e * psi_l.get(n3) * (w * d_hat(pair.tau, p));
    }
    acc
}

/// `𝒜^{(1)}_{n,n₁}`: the raw kernel with the paired `n₂ + n₃ = 0` mean removed.
pub fn kernel_a_renormalized(n: Mode, n1: Mode, pair: &PsiPair, split: Split) -> C64 {
    let raw = kernel_a(n, n1, pair, split);
    if n == n1 {
        raw - counterterm(n, pair.tau, split, pair.early.cutoff(), pair.early.shape())
    } else {
        raw
    }
}

/// `𝒜^{(2)}_{n,n}(τ) = Σ_{|n₂|≤N} χ_θ(n,n₂) ω(|n+n₂|,|n₂|) D̂_{n+n₂}(τ) σ_{n₂}(τ)`.
pub fn counterterm(n: Mode, tau: f64, split: Split, cutoff: usize, shape: Shape) -> f64 {
    let a = lattice::norm(n);
    lattice::modes(cutoff, shape)
        .into_iter()
        .map(|n2| {
            let p = lattice::add(n, n2);
            let b = lattice::norm(n2);
            chi(a, b, split) * resonant_weight(lattice::norm(p), b) * d_hat(tau, p) * sigma_cov(n2, tau, 0.0)
        })
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterterms {
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    /// Truncation radius of the sums.
    pub cutoff: usize,
}

impl Counterterms {
    pub fn total(&self) -> f64 {
        self.a3 + self.a4 + self.a5
    }
}

/// Sum/difference-frequency split of the counter-term: with `ω₁ = ⟪n+n₂⟫`, `ω₂ = ⟪n₂⟫`,
/// `A3 = e^{-τ}Σ W sin(τ(ω₁+ω₂))/(2ω₁⟨n₂⟩²)`, `A4` the same with `ω₁−ω₂`, and
/// `A5 = e^{-τ}Σ W sin(τω₁) sin(τω₂)/(2ω₁ω₂⟨n₂⟩²)`.
pub fn kernel_counterterms(n: Mode, t: f64, tp: f64, split: Split, cutoff: usize, shape: Shape) -> Result<Counterterms> {
    split.validate()?;
    let tau = tau_of(t, tp)?;
    let e = (-tau).exp();
    let a = lattice::norm(n);
    let (mut a3, mut a4, mut a5) = (0.0, 0.0, 0.0);
    for n2 in lattice::modes(cutoff, shape) {
        let p = lattice::add(n, n2);
        let b = lattice::norm(n2);
        let w = chi(a, b, split) * resonant_weight(lattice::norm(p), b);
        if w == 0.0 {
            continue;
        }
        let w1 = damped_frequency(p);
        let w2 = damped_frequency(n2);
        let h = 1.0 / lattice::bracket_sq(n2);
        a3 += w * (tau * (w1 + w2)).sin() / (2.0 * w1) * h;
        a4 += w * (tau * (w1 - w2)).sin() / (2.0 * w1) * h;
        a5 += w * (tau * w1).sin() / w1 * (tau * w2).sin() / (2.0 * w2) * h;
    }
    Ok(Counterterms { a3: e * a3, a4: e * a4, a5: e * a5, cutoff })
}

/// Operator form `w ↦ Σ_{n₁} 𝒜_{n,n₁} ŵ(n₁)` restricted to `|n| ≤ out`.
pub struct KernelOperator<'a> {
    pair: &'a PsiPair,
    split: Split,
    out: usize,
}

impl<'a> KernelOperator<'a> {
    pub fn new(pair: &'a PsiPair, split: Split, out: usize) -> Result<Self> {
        split.validate()?;
        Ok(Self { pair, split, out })
    }

    fn blocks(u: &FourierField) -> usize {
        *lp::block_range(u).end()
    }

    /// `Σ_k (Σ_{j ≤ θk+c₀} P_j w)(P_k Ψ(t′))`.
    fn para_low(&self, w: &FourierField) -> Result<FourierField> {
        let psi = &self.pair.early;
        let out = w.cutoff() + psi.cutoff();
        let side = spectral::grid::product_side(w.cutoff(), psi.cutoff(), out);
        let mut acc = ProductGrid::new(side)?;
        for k in 0..=Self::blocks(psi) {
            let low = w.multiplier(|n| {
                let r = lattice::norm(n);
                (0..=lp::max_block(r) + 1).filter(|&j| self.split.allows(j, k)).map(|j| phi(j, r)).sum()
            });
            let pk = lp::lp_block(psi, k);
            if low.max_abs() == 0.0 || pk.max_abs() == 0.0 {
                continue;
            }
            acc.add_product(&low, &pk, 1.0)?;
        }
        Ok(acc.finish(out, w.shape()))
    }

    pub fn apply(&self, w: &FourierField) -> Result<FourierField> {
        let g = self.para_low(w)?;
        let tau = self.pair.tau;
        let h = g.multiplier(|p| d_hat(tau, p));
        lp::resonant_product(&h, &self.pair.late, self.out)
    }

    /// Adjoint for the pairing `Σ f̂ conj(ĝ)`; the result has cutoff `w_cutoff`.
    pub fn adjoint(&self, v: &FourierField, w_cutoff: usize) -> Result<FourierField> {
        let psi = &self.pair.late;
        let psi_e = &self.pair.early;
        let mid = v.cutoff() + psi.cutoff();
        let mut r = FourierField::zeros(mid, v.shape(), true);
        for l in 0..=lp::max_block(mid as f64 * 3f64.sqrt()) {
            let near = psi.multiplier(|n| phi_near(l, lattice::norm(n)));
            if near.max_abs() == 0.0 {
                continue;
            }
            let prod = spectral::multiply_to(&near, v, mid, v.shape())?;
            r = r.add(&prod.multiplier(|n| phi(l, lattice::norm(n))));
        }
        let tau = self.pair.tau;
        let e = r.multiplier(|p| d_hat(tau, p));
        let side = spectral::grid::product_side(psi_e.cutoff(), mid, w_cutoff);
        let mut out = FourierField::zeros(w_cutoff, v.shape(), true);
        for j in 0..=lp::max_block(w_cutoff as f64 * 3f64.sqrt()) {
            let t = psi_e.multiplier(|n| {
                let b = lattice::norm(n);
                (0..=lp::max_block(b) + 1).filter(|&k| self.split.allows(j, k)).map(|k| phi(k, b)).sum()
            });
            if t.max_abs() == 0.0 {
                continue;
            }
            let mut g = ProductGrid::new(side)?;
            g.add_product(&t, &e, 1.0)?;
            let prod = g.finish(w_cutoff, v.shape());
            out = out.add(&prod.multiplier(|n| phi(j, lattice::norm(n))));
        }
        Ok(out)
    }

    /// Power iteration on `𝒜*𝒜` from a random start; returns the estimate of `‖𝒜‖_{L²→L²}`
    /// on inputs of cutoff `w_cutoff`.
    pub fn norm_estimate(&self, w_cutoff: usize, iters: usize, seed: u64) -> Result<f64> {
        let shape = self.pair.early.shape();
        let mut w = rng::gaussian_field(w_cutoff, shape, StreamKey::new(seed, 0, purpose::SCALAR), |_| 1.0);
        let mut est = 0.0;
        for _ in 0..iters.max(1) {
            let nw = w.norm_sq().sqrt();
            if nw == 0.0 {
                return Ok(0.0);
            }
            w = w.scale(1.0 / nw);
            let aw = self.apply(&w)?;
            est = aw.norm_sq().sqrt();
            w = self.adjoint(&aw, w_cutoff)?;
        }
        Ok(est)
    }
}
