//! Renormalized potential energies, the taming functional and the force they generate.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields;
use crate::lattice;
use crate::renorm::{bessel0_symbol, bessel_symbol, PotentialParams, RenormTable};
use crate::spectral::{self, FourierField};

/// The four pieces of `Q_N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QComponents {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    pub q4: f64,
}

impl QComponents {
    pub fn sum(&self) -> f64 {
        self.q1 + self.q2 + self.q3 + self.q4
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub r_n: f64,
    pub r_n_diamond: f64,
    pub r_n_diamond2: Option<f64>,
    pub script_r_n: f64,
    pub wick_mass: f64,
    pub q_n: f64,
    pub q_components: QComponents,
}

/// `Σ_n V̂(n)|ŵ(n)|²`.
pub fn hartree_form(w: &FourierField, beta: f64) -> f64 {
    w.iter().map(|(n, v)| bessel_symbol(n, beta) * v.norm_sqr()).sum()
}

/// `Σ_{n≠0} V̂(n)|ŵ(n)|²`.
pub fn hartree_form0(w: &FourierField, beta: f64) -> f64 {
    w.iter().map(|(n, v)| bessel0_symbol(n, beta) * v.norm_sqr()).sum()
}

/// `∫ :u_N²: dx`.
pub fn wick_mass(u: &FourierField, table: &RenormTable) -> f64 {
    u.project(table.n).norm_sq() - table.sigma_n
}

/// `R_N(u) = ¼Σ V̂|ŵ|² − ½α_N` with `w = :u_N²:`.
pub fn r_n(u: &FourierField, table: &RenormTable) -> Result<f64> {
    let w = fields::wick_square(u, table)?;
    Ok(0.25 * hartree_form(&w, table.beta) - 0.5 * table.alpha_n)
}

/// `Q_N(u) = Σ_{n≠0}V̂(n)|(u_N²)^(n)|² − 2α_N`, so that `R_N = ¼Q_N + ¼(∫:u_N²:)²`.
pub fn q_n(u: &FourierField, table: &RenormTable) -> Result<f64> {
    let s = spectral::square(&u.project(table.n))?;
    Ok(hartree_form0(&s, table.beta) - 2.0 * table.alpha_n)
}

/// `(Q₁, Q₂, Q₃, Q₄)` with `b = |û|²` and `a = b − ⟨n⟩^{-2}` on `|n| ≤ N`:
/// `Q₁ = Σ_{k≠0}V̂|ŝ|² − 2Σ_{k≠0}V̂(b∗b) + Σ_{n≠0}V̂(2n)b²`,
/// `Q₂ = 2Σ_{k≠0}V̂(a∗a)`, `Q₃ = 4Σ aκ_N`, `Q₄ = −Σ_{n≠0}V̂(2n)b²`.
pub fn q_components(u: &FourierField, table: &RenormTable) -> Result<QComponents> {
    let beta = table.beta;
    let un = u.project(table.n);
    let b = FourierField::from_symbol(table.n, table.shape, |n| un.get(n).norm_sqr());
    let a = FourierField::from_symbol(table.n, table.shape, |n| un.get(n).norm_sqr() - 1.0 / lattice::bracket_sq(n));
    let (s, bb) = spectral::square_pair(&un, &b)?;
    let aa = spectral::square(&a)?;
    let pair_sum = |f: &FourierField| -> f64 { f.iter().map(|(k, v)| bessel0_symbol(k, beta) * v.re).sum() };
    let diag: f64 = b
        .iter()
        .map(|(n, v)| bessel0_symbol(lattice::add(n, n), beta) * v.re * v.re)
        .sum();
    let q1 = hartree_form0(&s, beta) - 2.0 * pair_sum(&bb) + diag;
    let q2 = 2.0 * pair_sum(&aa);
    let q3 = 4.0 * a.iter().map(|(n, v)| v.re * table.kappa_at(n)).sum::<f64>();
    Ok(QComponents { q1, q2, q3, q4: -diag })
}

/// `R_N^◇ = R_N − Σ_{|n|≤N} κ_N(n)(|û(n)|² − ⟨n⟩^{-2})`.
pub fn r_n_diamond(u: &FourierField, table: &RenormTable) -> Result<f64> {
    Ok(r_n(u, table)? - kappa_pairing(u, table))
}

/// `Σ κ_N(n)(|û(n)|² − ⟨n⟩^{-2})`.
pub fn kappa_pairing(u: &FourierField, table: &RenormTable) -> f64 {
    table
        .kappa
        .iter()
        .map(|(n, k)| k.re * (u.get(n).norm_sqr() - 1.0 / lattice::bracket_sq(n)))
        .sum()
}

/// `R_N^◇◇ = R_N^◇ + C_N`.
pub fn r_n_diamond2(u: &FourierField, table: &RenormTable) -> Result<f64> {
    let c = table
        .c_n
        .ok_or_else(|| Error::Config("R_N^◇◇ needs C_N in the renormalization table".into()))?;
    Ok(r_n_diamond(u, table)? + c.value)
}

/// `𝓡_N = σR_N − A|∫:u_N²:|^γ`.
pub fn script_r_n(u: &FourierField, params: &PotentialParams, table: &RenormTable) -> Result<f64> {
    let m = wick_mass(u, table);
    Ok(params.sigma * r_n(u, table)? - params.a * m.abs().powf(params.gamma))
}

/// `M_γ(w) = 2Aγ|∫w|^{γ−2}∫w`.
pub fn m_gamma(w: &FourierField, a: f64, gamma: f64) -> f64 {
    m_gamma_of_mass(w.zero_mode().re, a, gamma)
}

pub fn m_gamma_of_mass(m: f64, a: f64, gamma: f64) -> f64 {
    if m == 0.0 {
        if gamma < 2.0 {
            warn!("M_gamma evaluated at zero mass with gamma = {gamma} < 2; returning 0");
        }
        return 0.0;
    }
    2.0 * a * gamma * m.abs().powf(gamma - 2.0) * m
}

pub fn energy_breakdown(u: &FourierField, params: &PotentialParams, table: &RenormTable) -> Result<EnergyBreakdown> {
    let r = r_n(u, table)?;
    let rd = r_n_diamond(u, table)?;
    let m = wick_mass(u, table);
    Ok(EnergyBreakdown {
        r_n: r,
        r_n_diamond: rd,
        r_n_diamond2: table.c_n.map(|c| rd + c.value),
        script_r_n: params.sigma * r - params.a * m.abs().powf(params.gamma),
        wick_mass: m,
        q_n: q_n(u, table)?,
        q_components: q_components(u, table)?,
    })
}

/// `L²` gradient of `𝓡_N`: `σπ_N((V∗:u_N²:)u_N) − M_γ(:u_N²:)u_N`.
pub fn force(u: &FourierField, params: &PotentialParams, table: &RenormTable) -> Result<FourierField> {
    force_with_sigma(u, params, table, table.sigma_n)
}

/// As [`force`] but with an arbitrary constant subtracted in the Wick square
/// (`0` gives the un-renormalized nonlinearity).
pub fn force_with_sigma(u: &FourierField, params: &PotentialParams, table: &RenormTable, wick_shift: f64) -> Result<FourierField> {
    let un = u.project(table.n);
    let w = fields::wick_square_with(&un, table.n, wick_shift)?;
    let m = w.zero_mode().re;
    let vw = w.multiplier(|n| bessel_symbol(n, table.beta));
    let mut f = spectral::multiply_to(&vw, &un, table.n, table.shape)?;
    let mg = m_gamma_of_mass(m, params.a, params.gamma);
    let sigma = params.sigma;
    f.fill_with(|n, v| v * sigma - un.get(n) * mg);
    Ok(f)
}

/// Directional derivative of [`force`] at `u` along `v`:
/// `σπ_N[(V∗2u v)u + (V∗:u²:)v] − M_γ v − 4Aγ(γ−1)|m|^{γ−2}(∫uv)u`.
pub fn force_derivative(u: &FourierField, v: &FourierField, params: &PotentialParams, table: &RenormTable) -> Result<FourierField> {
    let n = table.n;
    let un = u.project(n);
    let vn = v.project(n);
    let w = fields::wick_square(&un, table)?;
    let m = w.zero_mode().re;
    let uv = spectral::multiply(&un, &vn)?.multiplier(|k| 2.0 * bessel_symbol(k, table.beta));
    let vw = w.multiplier(|k| bessel_symbol(k, table.beta));
    let side = spectral::grid::product_side(2 * n, n, n);
    let mut acc = spectral::ProductGrid::new(side)?;
    acc.add_product(&uv, &un, 1.0)?;
    acc.add_product(&vw, &vn, 1.0)?;
    let mut d = acc.finish(n, table.shape);
    let mg = m_gamma_of_mass(m, params.a, params.gamma);
    let mg_prime = if params.a == 0.0 || m == 0.0 {
        0.0
    } else {
        2.0 * params.a * params.gamma * (params.gamma - 1.0) * m.abs().powf(params.gamma - 2.0)
    };
    let dm = 2.0 * un.inner(&vn).re;
    let sigma = params.sigma;
    d.fill_with(|k, z| z * sigma - vn.get(k) * mg - un.get(k) * (mg_prime * dm));
    Ok(d)
}

/// `Σ V̂(n)|(u²)^(n)|²`, nonnegative for every real `u`.
pub fn quartic_form(u: &FourierField, beta: f64) -> Result<f64> {
    Ok(hartree_form(&spectral::square(u)?, beta))
}

/// `Q(u) = ¼Σ_{n≠0}V̂(n)|(u²)^(n)|²`.
pub fn witness_q(u: &FourierField, beta: f64) -> Result<f64> {
    Ok(0.25 * hartree_form0(&spectral::square(u)?, beta))
}
