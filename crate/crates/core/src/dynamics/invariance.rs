//! Statistical comparison of long-run dynamics against the MALA reference ensemble.

use serde::{Deserialize, Serialize};

use crate::energy;
use crate::error::{Error, Result};
use crate::lattice::{self, Mode};
use crate::parallel::par_map;
use crate::renorm::{PotentialParams, RenormTable};
use crate::rng::{self, purpose, StreamKey};
use crate::spectral::FourierField;
use crate::stats::{self, Estimate};
use crate::stochwave::WavePair;

use super::integrators::{evolve_sdnlw, evolve_snlh, IntegratorConfig, Scheme};
use super::mala::{gibbs_reference, McmcConfig};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceConfig {
    pub integrator: IntegratorConfig,
    pub trajectories: usize,
    /// Discarded initial time of every trajectory.
    pub burn_time: f64,
    /// Extrapolate in the step size using runs at `h` and `h/2`.
    pub richardson: bool,
    /// Batches per series for the batch-means standard error.
    pub batches: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatComparison {
    pub name: String,
    pub dynamics: Estimate,
    pub reference: Estimate,
    pub z: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub verdict: Verdict,
    /// Shell averages of `|û(n)|²`, the Wick mass and `R_N`; these decide the verdict.
    pub comparisons: Vec<StatComparison>,
    /// Individual modes of Λ₀, reported for inspection.
    pub per_mode: Vec<StatComparison>,
    pub ess_dynamics: f64,
    pub ess_reference: f64,
    pub mcmc_acceptance: f64,
    pub scheme: Scheme,
    pub h: f64,
    pub richardson: bool,
}

/// Observable layout: one entry per `|n|²` shell, then the Wick mass, then `R_N`.
struct Observables {
    shells: Vec<i64>,
    modes: Vec<Mode>,
}

impl Observables {
    fn new(table: &RenormTable) -> Self {
        Self { shells: lattice::shells(table.n, table.shape), modes: lattice::half_modes(table.n, table.shape) }
    }

    fn names(&self) -> Vec<String> {
        let mut v: Vec<String> = self.shells.iter().map(|s| format!("shell|n|^2={s}")).collect();
        v.push("wick_mass".into());
        v.push("R_N".into());
        v
    }

    fn mode_names(&self) -> Vec<String> {
        self.modes.iter().map(|n| format!("mode({},{},{})", n[0], n[1], n[2])).collect()
    }

    fn eval(&self, u: &FourierField, table: &RenormTable) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut sums = vec![0.0; self.shells.len()];
        let mut counts = vec![0usize; self.shells.len()];
        for (n, v) in u.project(table.n).iter() {
            let i = self.shells.binary_search(&lattice::norm_sq(n)).expect("shell");
            sums[i] += v.norm_sqr();
            counts[i] += 1;
        }
        let mut out: Vec<f64> = sums.iter().zip(&counts).map(|(s, c)| s / *c as f64).collect();
        out.push(energy::wick_mass(u, table));
        out.push(energy::r_n(u, table)?);
        let modes = self.modes.iter().map(|&n| u.get(n).norm_sqr()).collect();
        Ok((out, modes))
    }
}

/// Column-wise series.
struct Series {
    cols: Vec<Vec<f64>>,
}

impl Series {
    fn new(k: usize) -> Self {
        Self { cols: vec![Vec::new(); k] }
    }
    fn push(&mut self, row: &[f64]) {
        for (c, v) in self.cols.iter_mut().zip(row) {
            c.push(*v);
        }
    }
    fn len(&self) -> usize {
        self.cols.first().map_or(0, |c| c.len())
    }
}

/// Batch means per column, with the number of batches reduced until each batch
/// spans at least 20 autocorrelation times of the reference column.
fn batch_estimates(series: &[Series], key_col: usize, batches: usize) -> (Vec<Estimate>, f64) {
    let ncols = series[0].cols.len();
    let mut pooled: Vec<Vec<f64>> = vec![Vec::new(); ncols];
    let mut ess = 0.0;
    for s in series {
        let len = s.len();
        let tau = stats::autocorr_time(&s.cols[key_col]);
        ess += len as f64 / tau;
        let b = batches.min((len as f64 / (20.0 * tau)).floor() as usize).max(2);
        let bl = len / b;
        for (c, col) in s.cols.iter().enumerate() {
            for i in 0..b {
                pooled[c].push(col[i * bl..(i + 1) * bl].iter().sum::<f64>() / bl as f64);
            }
        }
    }
    (pooled.iter().map(|p| stats::mean_se(p)).collect(), ess)
}

fn run_dynamics(
    starts: &[FourierField],
    params: &PotentialParams,
    table: &RenormTable,
    cfg: &IntegratorConfig,
    burn: f64,
    obs: &Observables,
    seed: u64,
    key_col: usize,
    batches: usize,
) -> Result<(Vec<Estimate>, Vec<Estimate>, f64)> {
    let runs: Vec<Result<(Series, Series)>> = par_map(starts.len(), |i| {
        let key = StreamKey::new(seed, i as u64, purpose::WAVE_NOISE);
        let burn_steps = (burn / cfg.h).round() as usize;
        let mut main = Series::new(obs.shells.len() + 2);
        let mut modes = Series::new(obs.modes.len());
        let mut record = |t_index: usize, u: &FourierField| -> Result<()> {
            if t_index > burn_steps {
                let (row, m) = obs.eval(u, table)?;
                main.push(&row);
                modes.push(&m);
            }
            Ok(())
        };
        let total = IntegratorConfig { t_end: cfg.t_end + burn, ..*cfg };
        match cfg.scheme {
            Scheme::StrangSplit => {
                let vel = rng::gaussian_field(table.n, table.shape, StreamKey::new(seed, i as u64, purpose::INIT_VEL), |_| 1.0);
                let init = WavePair { pos: starts[i].clone(), vel, time: 0.0 };
                let mut step = 0usize;
                evolve_sdnlw(&init, params, table, &total, key, |s| {
                    step += cfg.record_every;
                    record(step, &s.pos)
                })?;
            }
            Scheme::ExponentialEuler => {
                let mut step = 0usize;
                evolve_snlh(&starts[i], params, table, &total, key, |_, u| {
                    step += cfg.record_every;
                    record(step, u)
                })?;
            }
        }
        Ok((main, modes))
    });
    let mut mains = Vec::new();
    let mut modes = Vec::new();
    for r in runs {
        let (a, b) = r?;
        mains.push(a);
        modes.push(b);
    }
    let (est, ess) = batch_estimates(&mains, key_col, batches);
    let (mode_est, _) = batch_estimates(&modes, 0, batches);
    Ok((est, mode_est, ess))
}

fn extrapolate(coarse: &Estimate, fine: &Estimate, order: i32) -> Estimate {
    let f = 2f64.powi(order);
    let value = (f * fine.value - coarse.value) / (f - 1.0);
    let se = ((f * fine.se).powi(2) + coarse.se.powi(2)).sqrt() / (f - 1.0);
    Estimate::new(value, se)
}

/// Compares time averages of the dynamics (started from reference samples)
/// against ensemble averages of [`gibbs_reference`].
pub fn invariance_test(
    params: &PotentialParams,
    table: &RenormTable,
    cfg: &InvarianceConfig,
    mcmc: &McmcConfig,
    seed: u64,
) -> Result<InvarianceReport> {
    if table.n > 6 {
        return Err(Error::Config(format!("invariance tests are limited to N <= 6, got {}", table.n)));
    }
    if cfg.trajectories == 0 {
        return Err(Error::Config("need at least one trajectory".into()));
    }
    let obs = Observables::new(table);
    let key_col = obs.shells.len();
    let chain = gibbs_reference(params, table, mcmc, StreamKey::new(seed, 0, purpose::MALA))?;
    let mut ref_main = Series::new(obs.shells.len() + 2);
    let mut ref_modes = Series::new(obs.modes.len());
    for u in &chain.samples {
        let (row, m) = obs.eval(u, table)?;
        ref_main.push(&row);
        ref_modes.push(&m);
    }
    let (ref_est, ess_ref) = batch_estimates(std::slice::from_ref(&ref_main), key_col, cfg.batches);
    let (ref_mode_est, _) = batch_estimates(std::slice::from_ref(&ref_modes), 0, cfg.batches);

    let stride = (chain.samples.len() / cfg.trajectories).max(1);
    let starts: Vec<FourierField> = (0..cfg.trajectories)
        .map(|i| chain.samples[((i + 1) * stride - 1).min(chain.samples.len() - 1)].clone())
        .collect();
    let dyn_seed = seed.wrapping_add(0x9E37_79B9);
    let ic = &cfg.integrator;
    let (mut dyn_est, mut dyn_modes, ess_dyn) =
        run_dynamics(&starts, params, table, ic, cfg.burn_time, &obs, dyn_seed, key_col, cfg.batches)?;
    if cfg.richardson {
        let fine = IntegratorConfig { h: 0.5 * ic.h, record_every: 2 * ic.record_every, ..*ic };
        let (fe, fm, _) = run_dynamics(&starts, params, table, &fine, cfg.burn_time, &obs, dyn_seed ^ 1, key_col, cfg.batches)?;
        let order = match ic.scheme {
            Scheme::StrangSplit => 2,
            Scheme::ExponentialEuler => 1,
        };
        dyn_est = dyn_est.iter().zip(&fe).map(|(c, f)| extrapolate(c, f, order)).collect();
        dyn_modes = dyn_modes.iter().zip(&fm).map(|(c, f)| extrapolate(c, f, order)).collect();
    }

    let compare = |names: Vec<String>, d: &[Estimate], r: &[Estimate]| -> Vec<StatComparison> {
        names
            .into_iter()
            .zip(d.iter().zip(r))
            .map(|(name, (d, r))| {
                let z = d.z_score(r);
                StatComparison { name, dynamics: *d, reference: *r, z, pass: z <= 3.0 }
            })
            .collect()
    };
    let comparisons = compare(obs.names(), &dyn_est, &ref_est);
    let per_mode = compare(obs.mode_names(), &dyn_modes, &ref_mode_est);
    let verdict = if ess_dyn < 100.0 || ess_ref < 100.0 {
        Verdict::Inconclusive
    } else if comparisons.iter().all(|c| c.pass) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(InvarianceReport {
        verdict,
        comparisons,
        per_mode,
        ess_dynamics: ess_dyn,
        ess_reference: ess_ref,
        mcmc_acceptance: chain.acceptance,
        scheme: ic.scheme,
        h: ic.h,
        richardson: cfg.richardson,
    })
}
