//! The resonant object `Z = (V∗:Ψ²:) ⊜ Ψ`, its pieces, and `𝔸_N`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::{self, Shape};
use crate::renorm::{bessel0_symbol, RenormTable};
use crate::rng::{purpose, StreamKey};
use crate::spectral::lp::{self, phi, phi_near, resonant_weight};
use crate::spectral::{self, FourierField, ProductGrid};
use crate::stats::{self, Estimate};

use super::propagator::{d_hat, stationary_pair, stoch_convolution_step};

/// `Z = Z₁ + Z₂` with `Z₁ = Z₁₁ + Z₁₂ + Z₁₃ + Z₁₄`, all on `|n| ≤ out`.
#[derive(Clone, Debug)]
pub struct ResonantObject {
    pub z: FourierField,
    pub z1: FourierField,
    pub z2: FourierField,
    pub z11: FourierField,
    pub z12: FourierField,
    pub z13: FourierField,
    pub z14: FourierField,
}

/// `Σ_{n₂} ω(|n+n₂|, |n₂|) V̂₀(n+n₂) g(n₂)` for an even real `g` of cutoff `N`.
pub fn resonant_correlation(g: &FourierField, beta: f64, out: usize) -> Result<FourierField> {
    let n = g.cutoff();
    let shape = g.shape();
    let side = spectral::grid::product_side(2 * n, n, out);
    let v0 = FourierField::from_symbol(2 * n, shape, |m| bessel0_symbol(m, beta));
    let jmax = lp::max_block(2.0 * n as f64 * if shape == Shape::Cube { 3f64.sqrt() } else { 1.0 });
    let mut acc = ProductGrid::new(side)?;
    for j in 0..=jmax {
        let f = v0.multiplier(|m| phi(j, lattice::norm(m)));
        let h = g.multiplier(|m| phi_near(j, lattice::norm(m)));
        if f.max_abs() == 0.0 || h.max_abs() == 0.0 {
            continue;
        }
        acc.add_product(&f, &h, 1.0)?;
    }
    Ok(acc.finish(out, shape))
}

/// `S_N(n) = Σ_{|n₂|≤N, n+n₂≠0} ω(|n+n₂|,|n₂|) V̂(n+n₂)⟨n₂⟩^{-2}` on `|n| ≤ out`.
pub fn resonant_sum(n: usize, beta: f64, shape: Shape, out: usize) -> Result<FourierField> {
    resonant_correlation(&crate::renorm::free_covariance(n, shape), beta, out)
}

/// Precomputed data for repeated evaluations of `Z` at a fixed `(N, β, out)`.
#[derive(Clone, Debug)]
pub struct ResonantContext {
    table: RenormTable,
    out: usize,
    s_n: FourierField,
}

impl ResonantContext {
    pub fn new(table: RenormTable, out: usize) -> Result<Self> {
        if out > table.n {
            return Err(Error::Config(format!("output cutoff {out} exceeds N = {}", table.n)));
        }
        let s_n = resonant_sum(table.n, table.beta, table.shape, out)?;
        Ok(Self { table, out, s_n })
    }
    pub fn out(&self) -> usize {
        self.out
    }
    pub fn s_n(&self) -> &FourierField {
        &self.s_n
    }
    pub fn table(&self) -> &RenormTable {
        &self.table
    }

    fn z1_and_mass(&self, psi: &FourierField) -> Result<(FourierField, f64, FourierField)> {
        let p = psi.project(self.table.n);
        let s = spectral::square(&p)?;
        let mass = s.zero_mode().re - self.table.sigma_n;
        let v0s = crate::renorm::apply_v0(&s, self.table.beta);
        let z1 = lp::resonant_product(&v0s, &p, self.out)?;
        Ok((z1, mass, p))
    }

    fn z2(&self, p: &FourierField, mass: f64) -> FourierField {
        FourierField::from_fn(self.out, p.shape(), true, |n| p.get(n) * (mass * resonant_weight(0.0, lattice::norm(n))))
    }

    /// `Z` alone.
    pub fn z(&self, psi: &FourierField) -> Result<FourierField> {
        let (z1, mass, p) = self.z1_and_mass(psi)?;
        Ok(z1.add(&self.z2(&p, mass)))
    }

    /// `Z` with all pieces.
    pub fn pieces(&self, psi: &FourierField) -> Result<ResonantObject> {
        let beta = self.table.beta;
        let (z1, mass, p) = self.z1_and_mass(psi)?;
        let z2 = self.z2(&p, mass);
        let a = FourierField::from_symbol(self.table.n, p.shape(), |n| p.get(n).norm_sqr() - 1.0 / lattice::bracket_sq(n));
        let ca = resonant_correlation(&a, beta, self.out)?;
        let z12 = FourierField::from_fn(self.out, p.shape(), true, |n| p.get(n) * (2.0 * ca.get(n).re));
        let z13 = FourierField::from_fn(self.out, p.shape(), true, |n| p.get(n) * (2.0 * self.s_n.get(n).re));
        let z14 = FourierField::from_fn(self.out, p.shape(), true, |n| {
            let nn = lattice::add(n, n);
            let w = bessel0_symbol(nn, beta) * resonant_weight(lattice::norm(nn), lattice::norm(n));
            p.get(n) * (-w * p.get(n).norm_sqr())
        });
        let z11 = z1.sub(&z12).sub(&z13).sub(&z14);
        let z = z1.add(&z2);
        Ok(ResonantObject { z, z1, z2, z11, z12, z13, z14 })
    }
}

/// Convenience wrapper building a one-off [`ResonantContext`].
pub fn resonant_object(psi: &FourierField, table: &RenormTable, out: usize) -> Result<ResonantObject> {
    ResonantContext::new(table.clone(), out)?.pieces(psi)
}

/// `(Ψ(t′), Ψ(t))` with `t − t′ = τ` from the stationary stochastic convolution.
#[derive(Clone, Debug)]
pub struct PsiPair {
    pub early: FourierField,
    pub late: FourierField,
    pub tau: f64,
}

pub fn psi_pair(cutoff: usize, shape: Shape, tau: f64, seed: u64, replica: u64) -> PsiPair {
    let s0 = stationary_pair(cutoff, shape, seed, replica);
    let late = if tau > 0.0 {
        stoch_convolution_step(&s0, tau, StreamKey::new(seed, replica, purpose::WAVE_NOISE)).pos
    } else {
        s0.pos.clone()
    };
    PsiPair { early: s0.pos, late, tau }
}

/// `𝔸̂_N(n,t,t′) = Σ_{n₁+n₂=n} ω(|n₁|,|n₂|) D̂_{n₁}(t−t′) Ψ̂(n₁,t′) Ψ̂(n₂,t)` on `|n| ≤ out`.
pub fn frak_a(pair: &PsiPair, out: usize) -> Result<FourierField> {
    let tau = pair.tau;
    let f = pair.early.multiplier(|n| d_hat(tau, n));
    lp::resonant_product(&f, &pair.late, out)
}

/// Mean of `|X̂(n)|²` over each integer shell `round(|n|)`, with the standard
/// error taken across samples.
pub fn shell_means(samples: &[FourierField]) -> Vec<(f64, Estimate)> {
    let mut per_shell: BTreeMap<i64, Vec<f64>> = BTreeMap::new();
    for s in samples {
        let mut acc: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
        for (n, v) in s.iter() {
            let e = acc.entry(lattice::norm(n).round() as i64).or_insert((0.0, 0));
            e.0 += v.norm_sqr();
            e.1 += 1;
        }
        for (r, (sum, cnt)) in acc {
            per_shell.entry(r).or_default().push(sum / cnt as f64);
        }
    }
    per_shell.into_iter().map(|(r, xs)| (r as f64, stats::mean_se(&xs))).collect()
}
