//! The focusing witness drift `θ⁰ = 2·𝟙_{t>½}⟨∇⟩(−Z_M + √σ̃_M f_M)` and the lower-bound
//! certificate it yields for `log 𝔼[e^{min(σR_N, L)}𝟙_{|∫:u²:| ≤ K}]`.

use std::sync::OnceLock;

use serde::Serialize;

use crate::energy;
use crate::error::{Error, Result};
use crate::fields::{self, WienerPath};
use crate::lattice::{self, Shape};
use crate::parallel::par_map;
use crate::renorm::RenormTable;
use crate::spectral::{self, FourierField};
use crate::stats::{self, Estimate, LineFit};

use super::drift::{build_adapted, DriftPath};

/// Annular profile `exp(−1/((r−½)(1−r)))` on `(½, 1)`.
pub fn bump_profile(r: f64) -> f64 {
    if r <= 0.5 || r >= 1.0 {
        0.0
    } else {
        (-1.0 / ((r - 0.5) * (1.0 - r))).exp()
    }
}

/// `c` with `4π c² ∫ r² b(r)² dr = 1`.
pub fn bump_normalization() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let n = 200_000;
        let h = 0.5 / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let r = 0.5 + i as f64 * h;
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * r * r * bump_profile(r).powi(2);
        }
        let integral = 4.0 * std::f64::consts::PI * s * h / 3.0;
        integral.sqrt().recip()
    })
}

/// `f_M` with `f̂_M(n) = M^{-3/2} c·b(|n|/M)`, supported on `M/2 < |n| < M`.
pub fn build_f_m(m: usize, shape: Shape) -> Result<FourierField> {
    if m < 4 {
        return Err(Error::Config(format!("the witness needs M ≥ 4, got {m}")));
    }
    let c = bump_normalization() * (m as f64).powf(-1.5);
    Ok(FourierField::from_symbol(m, shape, |n| c * bump_profile(lattice::norm(n) / m as f64)))
}

/// `Q(f_M)`.
pub fn q_f_m(m: usize, beta: f64, shape: Shape) -> Result<f64> {
    energy::witness_q(&build_f_m(m, shape)?, beta)
}

/// `(θ⁰, Θ⁰)`; the time grid must have an even number of intervals.
pub fn witness_drift(path: &WienerPath, m: usize) -> Result<(DriftPath, FourierField)> {
    let k = path.steps();
    if k % 2 != 0 {
        return Err(Error::Config("the witness drift needs an even number of time intervals".into()));
    }
    if path.cutoff() < m {
        return Err(Error::Config(format!("M = {m} exceeds the path cutoff {}", path.cutoff())));
    }
    let f = build_f_m(m, path.shape())?;
    let sigma_tilde = 0.5 * crate::renorm::sigma_n(m, path.shape());
    let mut theta_big = None;
    let drift = build_adapted(path, |past| {
        if past.interval() < k / 2 {
            return Ok(FourierField::zeros(m, path.shape(), true));
        }
        let mut b = FourierField::zeros(m, path.shape(), true);
        for j in 0..k / 2 {
            b = b.add(&past.increment(j)?.project(m));
        }
        let z = b.multiplier(|n| 1.0 / lattice::bracket(n));
        let big = f.scale(sigma_tilde.sqrt()).sub(&z);
        let v = big.multiplier(|n| 2.0 * lattice::bracket(n));
        theta_big.get_or_insert(big);
        Ok(v)
    })?;
    let big = theta_big.ok_or_else(|| Error::Config("empty time grid".into()))?;
    Ok((drift, big))
}

/// Per-path `Q(Θ⁰)` and drift cost at one `M`. Both depend only on `π_M Y(½)`, so
/// they do not involve the cutoff `N`.
#[derive(Clone, Debug, Serialize)]
pub struct Theta0Samples {
    pub m: usize,
    pub beta: f64,
    pub sigma_tilde: f64,
    pub q_f_m: f64,
    /// `Q(Θ⁰)`.
    pub q: Vec<f64>,
    /// `½∫‖θ⁰‖²dt = ‖Θ⁰‖²_{H¹}`.
    pub cost: Vec<f64>,
}

impl Theta0Samples {
    fn empty(m: usize, beta: f64, shape: Shape, paths: usize) -> Result<Self> {
        Ok(Self {
            m,
            beta,
            sigma_tilde: 0.5 * crate::renorm::sigma_n(m, shape),
            q_f_m: q_f_m(m, beta, shape)?,
            q: Vec::with_capacity(paths),
            cost: Vec::with_capacity(paths),
        })
    }
}

/// Per-path witness quantities at one `(M, N)`; independent of `σ`.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessSamples {
    pub theta0: Theta0Samples,
    pub n: usize,
    /// `R_N(Y_N(1) + Θ⁰)`.
    pub r: Vec<f64>,
    /// Cutoff statistic `∫:(Y_N(1) + Θ⁰)²:dx`.
    pub s: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub m: usize,
    pub sigma: f64,
    /// `𝔼Q(Θ⁰)`.
    pub q_theta0: Estimate,
    pub drift_cost: Estimate,
    pub cutoff_prob: Estimate,
    /// `𝔼(∫:u²:)²` for the drifted field.
    pub cutoff_second_moment: Estimate,
    /// `𝔼[min(σR_N, L)𝟙_{|∫:u²:| ≤ K}] − ½𝔼∫‖θ⁰‖²`.
    pub certificate: Estimate,
    pub l: f64,
    pub k: f64,
    pub inconclusive: bool,
}

fn theta0_pair(paths: &[WienerPath], m: usize, beta: f64) -> Result<(Vec<FourierField>, Vec<[f64; 2]>)> {
    let bigs = paths.iter().map(|p| Ok(witness_drift(p, m)?.1)).collect::<Result<Vec<_>>>()?;
    let zero = FourierField::zeros(m, bigs[0].shape(), true);
    let (s0, s1) = spectral::square_pair(&bigs[0], bigs.get(1).unwrap_or(&zero))?;
    let vals = [s0, s1]
        .iter()
        .zip(&bigs)
        .map(|(sq, big)| [0.25 * energy::hartree_form0(sq, beta), big.sobolev_sq(1.0)])
        .collect();
    Ok((bigs, vals))
}

fn check_paths(paths: usize) -> Result<()> {
    if paths < 2 {
        return Err(Error::Config("the witness needs at least two paths".into()));
    }
    Ok(())
}

/// `Q(Θ⁰)` and drift cost on `paths` Wiener paths drawn at cutoff `M`.
pub fn sample_theta0(beta: f64, shape: Shape, m: usize, paths: usize, seed: u64) -> Result<Theta0Samples> {
    check_paths(paths)?;
    let rows: Vec<Result<Vec<[f64; 2]>>> = par_map(paths.div_ceil(2), |i| {
        let ps = (2 * i..(2 * i + 2).min(paths))
            .map(|p| fields::sample_y_path(m, shape, 2, seed, p as u64))
            .collect::<Result<Vec<_>>>()?;
        Ok(theta0_pair(&ps, m, beta)?.1)
    });
    let mut out = Theta0Samples::empty(m, beta, shape, paths)?;
    for row in rows {
        for [q, c] in row? {
            out.q.push(q);
            out.cost.push(c);
        }
    }
    Ok(out)
}

/// Samples the witness on `paths` Wiener paths at cutoff `table.n ≥ M`, two paths per transform.
pub fn sample_witness(table: &RenormTable, m: usize, paths: usize, timesteps: usize, seed: u64) -> Result<WitnessSamples> {
    if table.n < m {
        return Err(Error::Config(format!("cutoff N = {} is below M = {m}", table.n)));
    }
    check_paths(paths)?;
    let rows: Vec<Result<Vec<[f64; 4]>>> = par_map(paths.div_ceil(2), |i| {
        let ps = (2 * i..(2 * i + 2).min(paths))
            .map(|p| fields::sample_y_path(table.n, table.shape, timesteps, seed, p as u64))
            .collect::<Result<Vec<_>>>()?;
        let (bigs, vals) = theta0_pair(&ps, m, table.beta)?;
        let us: Vec<FourierField> = ps
            .iter()
            .zip(&bigs)
            .map(|(p, big)| p.y(p.steps()).project(table.n).add(&big.resize(table.n, table.shape)))
            .collect();
        let zero = FourierField::zeros(table.n, table.shape, true);
        let (s0, s1) = spectral::square_pair(&us[0], us.get(1).unwrap_or(&zero))?;
        Ok([s0, s1]
            .into_iter()
            .zip(&us)
            .zip(vals)
            .map(|((mut w, u), [q, c])| {
                w.add_constant(-table.sigma_n);
                let r = 0.25 * energy::hartree_form(&w, table.beta) - 0.5 * table.alpha_n;
                [r, energy::wick_mass(u, table), q, c]
            })
            .collect())
    });
    let mut out = WitnessSamples {
        theta0: Theta0Samples::empty(m, table.beta, table.shape, paths)?,
        n: table.n,
        r: Vec::with_capacity(paths),
        s: Vec::with_capacity(paths),
    };
    for row in rows {
        for [r, s, q, c] in row? {
            out.r.push(r);
            out.s.push(s);
            out.theta0.q.push(q);
            out.theta0.cost.push(c);
        }
    }
    Ok(out)
}

/// The cutoff statistic `∫:(Y_N(1) + Θ⁰)²:dx` alone, on the same paths as
/// [`sample_witness`] with `table.n = n`. Needs no products, so it is cheap at large `N`.
pub fn sample_cutoff_statistic(n: usize, shape: Shape, m: usize, paths: usize, timesteps: usize, seed: u64) -> Result<Vec<f64>> {
    if n < m {
        return Err(Error::Config(format!("cutoff N = {n} is below M = {m}")));
    }
    check_paths(paths)?;
    let sigma = crate::renorm::sigma_n(n, shape);
    par_map(paths, |p| {
        let path = fields::sample_y_path(n, shape, timesteps, seed, p as u64)?;
        let big = witness_drift(&path, m)?.1;
        let u = path.y(path.steps()).project(n).add(&big.resize(n, shape));
        Ok(u.project(n).norm_sq() - sigma)
    })
    .into_iter()
    .collect()
}

impl WitnessSamples {
    /// `K = 10·SD(∫:u²:)`.
    pub fn default_k(&self) -> f64 {
        10.0 * stats::variance(&self.s).sqrt()
    }
    /// `L/σ = 10σ̃_M²Q(f_M)`.
    pub fn default_l_over_sigma(&self) -> f64 {
        10.0 * self.theta0.sigma_tilde.powi(2) * self.theta0.q_f_m
    }
    /// `min(R_N, L/σ)𝟙_{|∫:u²:| ≤ K}` per path.
    pub fn clipped(&self, l_over_sigma: f64, k: f64) -> Vec<f64> {
        self.r.iter().zip(&self.s).map(|(r, s)| if s.abs() <= k { r.min(l_over_sigma) } else { 0.0 }).collect()
    }

    pub fn report(&self, sigma: f64) -> WitnessReport {
        let k = self.default_k();
        let ls = self.default_l_over_sigma();
        self.report_with(sigma, ls, k)
    }

    pub fn report_with(&self, sigma: f64, l_over_sigma: f64, k: f64) -> WitnessReport {
        let n = self.s.len() as f64;
        let inside = self.s.iter().filter(|s| s.abs() <= k).count() as f64 / n;
        let cutoff_prob = Estimate::new(inside, (inside * (1.0 - inside) / n).sqrt());
        let x = self.clipped(l_over_sigma, k);
        let cert: Vec<f64> = x.iter().zip(&self.theta0.cost).map(|(x, c)| sigma * x - c).collect();
        let s2: Vec<f64> = self.s.iter().map(|s| s * s).collect();
        WitnessReport {
            m: self.theta0.m,
            sigma,
            q_theta0: stats::mean_se(&self.theta0.q),
            drift_cost: stats::mean_se(&self.theta0.cost),
            cutoff_prob,
            cutoff_second_moment: stats::mean_se(&s2),
            certificate: stats::mean_se(&cert),
            l: sigma * l_over_sigma,
            k,
            inconclusive: inside <= 0.5,
        }
    }
}

/// Witness certificate at one `M` with the default `L` and `K`.
pub fn witness_certificate(sigma: f64, table: &RenormTable, m: usize, paths: usize, seed: u64) -> Result<WitnessReport> {
    Ok(sample_witness(table, m, paths, 2, seed)?.report(sigma))
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessExponents {
    pub q_theta0: LineFit,
    pub drift_cost: LineFit,
    pub q_f_m: LineFit,
    pub sigma_tilde: LineFit,
}

/// Log-log slopes in `M` across a scan.
pub fn fit_exponents(samples: &[Theta0Samples]) -> Result<WitnessExponents> {
    if samples.len() < 2 {
        return Err(Error::Config("an exponent fit needs at least two values of M".into()));
    }
    let ms: Vec<f64> = samples.iter().map(|s| s.m as f64).collect();
    let q: Vec<Estimate> = samples.iter().map(|s| stats::mean_se(&s.q)).collect();
    let c: Vec<Estimate> = samples.iter().map(|s| stats::mean_se(&s.cost)).collect();
    let qf: Vec<f64> = samples.iter().map(|s| s.q_f_m).collect();
    let st: Vec<f64> = samples.iter().map(|s| s.sigma_tilde).collect();
    Ok(WitnessExponents {
        q_theta0: stats::loglog_fit_estimates(&ms, &q),
        drift_cost: stats::loglog_fit_estimates(&ms, &c),
        q_f_m: stats::loglog_fit(&ms, &qf),
        sigma_tilde: stats::loglog_fit(&ms, &st),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseRow {
    pub sigma: f64,
    pub m: usize,
    pub certificate: Estimate,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhaseScan {
    /// `Ĉ₁`: coefficient of `M³` in `𝔼[min(R_N, L/σ)𝟙]`.
    pub c1: Estimate,
    /// `Ĉ₂`: coefficient of `M³` in the drift cost.
    pub c2: Estimate,
    /// `σ̂ = Ĉ₂/Ĉ₁`, where `σĈ₁ − Ĉ₂` changes sign.
    pub threshold: f64,
    /// `(σ, σĈ₁ − Ĉ₂)`.
    pub coefficients: Vec<(f64, Estimate)>,
    pub rows: Vec<PhaseRow>,
}

fn m3_coefficient(ms: &[f64], ys: &[Estimate]) -> Estimate {
    let den: f64 = ms.iter().map(|m| m.powi(6)).sum();
    let value = ms.iter().zip(ys).map(|(m, y)| m.powi(3) * y.value).sum::<f64>() / den;
    let se = ms.iter().zip(ys).map(|(m, y)| (m.powi(3) * y.se).powi(2)).sum::<f64>().sqrt() / den;
    Estimate::new(value, se)
}

/// Certificates over `σ` for `β = 2`, reusing the same paths for every `σ`.
pub fn phase_scan_beta2(samples: &[WitnessSamples], sigmas: &[f64]) -> Result<PhaseScan> {
    if samples.iter().any(|s| (s.theta0.beta - 2.0).abs() > 1e-12) {
        return Err(Error::Config("the phase scan runs at β = 2".into()));
    }
    if samples.is_empty() {
        return Err(Error::Config("the phase scan needs at least one value of M".into()));
    }
    let ms: Vec<f64> = samples.iter().map(|s| s.theta0.m as f64).collect();
    let xs: Vec<Vec<f64>> = samples.iter().map(|s| s.clipped(s.default_l_over_sigma(), s.default_k())).collect();
    let xbar: Vec<Estimate> = xs.iter().map(|x| stats::mean_se(x)).collect();
    let cost: Vec<Estimate> = samples.iter().map(|s| stats::mean_se(&s.theta0.cost)).collect();
    let c1 = m3_coefficient(&ms, &xbar);
    let c2 = m3_coefficient(&ms, &cost);
    let coefficients = sigmas
        .iter()
        .map(|&sg| {
            let per_m: Vec<Estimate> = samples
                .iter()
                .zip(&xs)
                .map(|(s, x)| {
                    let d: Vec<f64> = x.iter().zip(&s.theta0.cost).map(|(x, c)| sg * x - c).collect();
                    stats::mean_se(&d)
                })
                .collect();
            (sg, m3_coefficient(&ms, &per_m))
        })
        .collect();
    let mut rows = Vec::new();
    for &sg in sigmas {
        for s in samples {
            rows.push(PhaseRow { sigma: sg, m: s.theta0.m, certificate: s.report(sg).certificate });
        }
    }
    Ok(PhaseScan { c1, c2, threshold: c2.value / c1.value, coefficients, rows })
}
