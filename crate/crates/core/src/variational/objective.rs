//! Boué–Dupuis objective `𝔼[F(Y(1) + I(θ)(1)) + ½∫₀¹‖θ‖²dt]` and its minimization
//! over linear feedback drifts.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::energy;
use crate::error::{Error, Result};
use crate::fields::{self, GaussianSpec, WienerPath};
use crate::lattice::{self, Mode};
use crate::parallel::par_map;
use crate::renorm::{PotentialParams, RenormTable};
use crate::spectral::{FourierField, C64};
use crate::stats::{self, Estimate};

use super::drift::DriftPath;

/// The functional `F` in `−log 𝔼_μ[e^{−F}]`.
#[derive(Clone, Debug)]
pub enum Functional {
    /// `F = −𝓡_N`, so that `𝔼[e^{−F}]` is the Gibbs partition function.
    Gibbs { params: PotentialParams, table: RenormTable },
    /// `F(u) = ½Σ_{|n|≤N} c(n)|û(n)|²`.
    Quadratic { coeffs: FourierField },
}

impl Functional {
    pub fn cutoff(&self) -> usize {
        match self {
            Functional::Gibbs { table, .. } => table.n,
            Functional::Quadratic { coeffs } => coeffs.cutoff(),
        }
    }
    pub fn shape(&self) -> lattice::Shape {
        match self {
            Functional::Gibbs { table, .. } => table.shape,
            Functional::Quadratic { coeffs } => coeffs.shape(),
        }
    }
    pub fn value(&self, u: &FourierField) -> Result<f64> {
        match self {
            Functional::Gibbs { params, table } => Ok(-energy::script_r_n(u, params, table)?),
            Functional::Quadratic { coeffs } => Ok(0.5 * coeffs.iter().map(|(n, c)| c.re * u.get(n).norm_sqr()).sum::<f64>()),
        }
    }
    /// `L²` gradient of `F`.
    pub fn gradient(&self, u: &FourierField) -> Result<FourierField> {
        match self {
            Functional::Gibbs { params, table } => Ok(energy::force(u, params, table)?.scale(-1.0)),
            Functional::Quadratic { coeffs } => Ok(FourierField::from_fn(coeffs.cutoff(), coeffs.shape(), true, |n| {
                u.get(n) * coeffs.get(n).re
            })),
        }
    }
    /// `Φ = −∇F`.
    pub fn descent(&self, u: &FourierField) -> Result<FourierField> {
        Ok(self.gradient(u)?.scale(-1.0))
    }
    /// `DΦ(u)[v]`, a symmetric operator in `v`.
    pub fn descent_derivative(&self, u: &FourierField, v: &FourierField) -> Result<FourierField> {
        match self {
            Functional::Gibbs { params, table } => energy::force_derivative(u, v, params, table),
            Functional::Quadratic { coeffs } => Ok(FourierField::from_fn(coeffs.cutoff(), coeffs.shape(), true, |n| {
                -v.get(n) * coeffs.get(n).re
            })),
        }
    }
    /// `½Σ log(1 + c(n)⟨n⟩^{-2})` for the quadratic case.
    pub fn exact_free_energy(&self) -> Option<f64> {
        match self {
            Functional::Quadratic { coeffs } => {
                Some(0.5 * coeffs.iter().map(|(n, c)| (1.0 + c.re / lattice::bracket_sq(n)).ln()).sum::<f64>())
            }
            _ => None,
        }
    }
}

/// `θ̂_k(n) = ⟨n⟩^{-1}[(a_k[g] + b_k[g]·m̃_k) X̂_k(n) + d_k[g]·Φ̂(X_k)(n)]` with `g` the `|n|²`
/// shell of `n`, `X_k` the drifted process at `t_k`, `m̃_k = Σ(|X̂_k(n)|² − t_k⟨n⟩^{-2})` and
/// `Φ = −∇F` the descent direction of the functional.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeedbackDrift {
    pub steps: usize,
    pub shells: Vec<i64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub d: Vec<Vec<f64>>,
}

impl FeedbackDrift {
    pub fn zero(cutoff: usize, shape: lattice::Shape, steps: usize) -> Self {
        let shells = lattice::shells(cutoff, shape);
        let g = shells.len();
        let z = vec![vec![0.0; g]; steps];
        Self { steps, shells, a: z.clone(), b: z.clone(), d: z }
    }
    fn uses_descent(&self) -> bool {
        self.d.iter().flatten().any(|x| *x != 0.0)
    }
    /// Flattened `(a, b, d)` coefficients.
    pub fn params(&self) -> Vec<f64> {
        self.a.iter().chain(&self.b).chain(&self.d).flatten().copied().collect()
    }
    pub fn set_params(&mut self, p: &[f64]) {
        let g = self.shells.len();
        let k = self.steps;
        for (block, table) in [&mut self.a, &mut self.b, &mut self.d].into_iter().enumerate() {
            for (i, row) in table.iter_mut().enumerate() {
                let at = (block * k + i) * g;
                row.copy_from_slice(&p[at..at + g]);
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum DriftPolicy {
    Zero,
    Deterministic(DriftPath),
    Feedback(FeedbackDrift),
}

struct ModeTable {
    modes: Vec<Mode>,
    inv_bracket: Vec<f64>,
    group: Vec<usize>,
}

impl ModeTable {
    fn new(cutoff: usize, shape: lattice::Shape, shells: &[i64]) -> Self {
        let modes = lattice::modes(cutoff, shape);
        let inv_bracket = modes.iter().map(|&n| 1.0 / lattice::bracket(n)).collect();
        let group = modes.iter().map(|&n| shells.binary_search(&lattice::norm_sq(n)).unwrap_or(0)).collect();
        Self { modes, inv_bracket, group }
    }
    fn gather(&self, u: &FourierField) -> Vec<C64> {
        self.modes.iter().map(|&n| u.get(n)).collect()
    }
    fn scatter(&self, x: &[C64], cutoff: usize, shape: lattice::Shape) -> FourierField {
        let mut u = FourierField::zeros(cutoff, shape, true);
        for (&n, &v) in self.modes.iter().zip(x) {
            u.set(n, v);
        }
        u
    }
}

struct PathOutcome {
    value: f64,
    grad: Option<Vec<f64>>,
}

fn run_feedback(f: &Functional, policy: &FeedbackDrift, mt: &ModeTable, path: &WienerPath, want_grad: bool) -> Result<PathOutcome> {
    let k_steps = policy.steps;
    if path.steps() != k_steps {
        return Err(Error::Config("path and drift use different time grids".into()));
    }
    let (cutoff, shape) = (f.cutoff(), f.shape());
    let h = 1.0 / k_steps as f64;
    let nm = mt.modes.len();
    let ng = policy.shells.len();
    let descent = policy.uses_descent() || want_grad;
    let zero = C64::new(0.0, 0.0);
    let weight: Vec<f64> = mt.inv_bracket.iter().map(|ib| ib * ib).collect();
    let mut xs: Vec<Vec<C64>> = Vec::with_capacity(k_steps);
    let mut phis: Vec<Vec<C64>> = Vec::with_capacity(k_steps);
    let mut thetas: Vec<Vec<C64>> = Vec::with_capacity(k_steps);
    let mut ms = Vec::with_capacity(k_steps);
    let mut x = vec![zero; nm];
    let mut cost = 0.0;
    for k in 0..k_steps {
        let t = k as f64 * h;
        let m: f64 = x.iter().zip(&weight).map(|(v, w)| v.norm_sqr() - t * w).sum();
        let phi = if descent { mt.gather(&f.descent(&mt.scatter(&x, cutoff, shape))?) } else { vec![zero; nm] };
        let dw = mt.gather(path.increment(k));
        let mut theta = vec![zero; nm];
        let mut next = vec![zero; nm];
        for i in 0..nm {
            let g = mt.group[i];
            let c = policy.a[k][g] + policy.b[k][g] * m;
            theta[i] = x[i] * c + phi[i] * policy.d[k][g];
            cost += 0.5 * h * weight[i] * theta[i].norm_sqr();
            next[i] = x[i] + theta[i] * (h * weight[i]) + dw[i] * mt.inv_bracket[i];
        }
        xs.push(std::mem::replace(&mut x, next));
        phis.push(phi);
        thetas.push(theta);
        ms.push(m);
    }
    let u = mt.scatter(&x, cutoff, shape);
    let value = f.value(&u)? + cost;
    if !want_grad {
        return Ok(PathOutcome { value, grad: None });
    }
    let mut grad = vec![0.0; 3 * k_steps * ng];
    let mut lam = mt.gather(&f.gradient(&u)?);
    let re = |a: C64, b: C64| a.re * b.re + a.im * b.im;
    for k in (0..k_steps).rev() {
        let (xk, phi, theta, m) = (&xs[k], &phis[k], &thetas[k], ms[k]);
        let mu: Vec<C64> = lam.iter().zip(theta).map(|(l, t)| l + t).collect();
        let mut ga = vec![0.0; ng];
        let mut gd = vec![0.0; ng];
        for i in 0..nm {
            let g = mt.group[i];
            ga[g] += h * weight[i] * re(mu[i], xk[i]);
            gd[g] += h * weight[i] * re(mu[i], phi[i]);
        }
        let dm: f64 = (0..ng).map(|g| ga[g] * policy.b[k][g]).sum();
        for g in 0..ng {
            grad[k * ng + g] = ga[g];
            grad[(k_steps + k) * ng + g] = ga[g] * m;
            grad[(2 * k_steps + k) * ng + g] = gd[g];
        }
        let pushed: Vec<C64> = (0..nm).map(|i| mu[i] * (h * weight[i] * policy.d[k][mt.group[i]])).collect();
        let curv = if pushed.iter().any(|z| *z != zero) {
            mt.gather(&f.descent_derivative(&mt.scatter(xk, cutoff, shape), &mt.scatter(&pushed, cutoff, shape))?)
        } else {
            vec![zero; nm]
        };
        for i in 0..nm {
            let c = policy.a[k][mt.group[i]] + policy.b[k][mt.group[i]] * m;
            lam[i] = lam[i] + mu[i] * (h * weight[i] * c) + xk[i] * (2.0 * dm) + curv[i];
        }
    }
    Ok(PathOutcome { value, grad: Some(grad) })
}

fn run_policy(f: &Functional, policy: &DriftPolicy, path: &WienerPath) -> Result<f64> {
    match policy {
        DriftPolicy::Zero => {
            let y = path.y(path.steps());
            f.value(&y.project(f.cutoff()))
        }
        DriftPolicy::Deterministic(d) => {
            if d.steps() != path.steps() {
                return Err(Error::Config("path and drift use different time grids".into()));
            }
            let y = path.y(path.steps()).project(f.cutoff());
            let shift = super::drift::i_theta(d).project(f.cutoff());
            Ok(f.value(&y.add(&shift))? + d.cost())
        }
        DriftPolicy::Feedback(p) => {
            let mt = ModeTable::new(f.cutoff(), f.shape(), &p.shells);
            Ok(run_feedback(f, p, &mt, path, false)?.value)
        }
    }
}

fn policy_steps(policy: &DriftPolicy, default: usize) -> usize {
    match policy {
        DriftPolicy::Zero => default,
        DriftPolicy::Deterministic(d) => d.steps(),
        DriftPolicy::Feedback(p) => p.steps,
    }
}

/// Monte Carlo estimate of the Boué–Dupuis objective over paths `first..first+paths`
/// of the Wiener ensemble `seed` (common random numbers across policies).
pub fn bd_objective(f: &Functional, policy: &DriftPolicy, paths: usize, first: u64, steps: usize, seed: u64) -> Result<Estimate> {
    let steps = policy_steps(policy, steps);
    let vals: Vec<Result<f64>> = par_map(paths, |p| {
        let path = fields::sample_y_path(f.cutoff(), f.shape(), steps, seed, first + p as u64)?;
        run_policy(f, policy, &path)
    });
    let vals: Vec<f64> = vals.into_iter().collect::<Result<_>>()?;
    let est = stats::mean_se(&vals);
    if est.se > 0.1 * est.value.abs() {
        warn!("Boué–Dupuis objective has relative standard error above 10%: {:.3e} ± {:.3e}", est.value, est.se);
    }
    Ok(est)
}

/// Direct estimate of `−log 𝔼_μ[e^{−F}]` with a delta-method standard error.
pub fn free_energy_direct(f: &Functional, samples: usize, seed: u64) -> Result<Estimate> {
    let vals: Vec<Result<f64>> = par_map(samples, |p| {
        let u = fields::sample_mu(&GaussianSpec { shape: f.shape(), ..GaussianSpec::new(f.cutoff(), 1.0, seed).replica(p as u64) });
        f.value(&u)
    });
    let vals: Vec<f64> = vals.into_iter().collect::<Result<_>>()?;
    let shift = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = vals.iter().map(|v| (-(v - shift)).exp()).collect();
    let e = stats::mean_se(&w);
    Ok(Estimate::new(shift - e.value.ln(), e.se / e.value))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    /// Heavy-ball steps with backtracking on the training objective.
    Momentum,
    Adam,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    pub intervals: usize,
    pub paths: usize,
    pub eval_paths: usize,
    pub iters: usize,
    pub optimizer: Optimizer,
    /// Initial step for momentum, fixed step for Adam.
    pub lr: f64,
    pub momentum: f64,
    /// Allow the mass-feedback coefficients `b_k`.
    pub mass_feedback: bool,
    /// Allow the descent-feedback coefficients `d_k`.
    pub descent_feedback: bool,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            intervals: 16,
            paths: 200,
            eval_paths: 2000,
            iters: 120,
            optimizer: Optimizer::Adam,
            lr: 0.05,
            momentum: 0.8,
            mass_feedback: true,
            descent_feedback: true,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizedDrift {
    pub policy: FeedbackDrift,
    /// Objective on the training ensemble.
    pub train_value: f64,
    /// Objective of the optimized drift on an independent ensemble.
    pub bound: Estimate,
    /// Objective of `θ = 0` on the same independent ensemble.
    pub baseline: Estimate,
    pub iterations: usize,
    pub stalled: bool,
}

/// Sample mean of the objective over fixed paths and, if `grad`, its exact gradient in the
/// coefficients (backward adjoint recursion).
pub fn feedback_objective(f: &Functional, policy: &FeedbackDrift, paths: &[WienerPath], grad: bool) -> Result<(f64, Vec<f64>)> {
    let mt = ModeTable::new(f.cutoff(), f.shape(), &policy.shells);
    let outs: Vec<Result<PathOutcome>> = par_map(paths.len(), |i| run_feedback(f, policy, &mt, &paths[i], grad));
    let mut value = 0.0;
    let mut g = vec![0.0; policy.params().len()];
    for o in outs {
        let o = o?;
        value += o.value;
        if let Some(pg) = o.grad {
            g.iter_mut().zip(pg).for_each(|(a, b)| *a += b);
        }
    }
    let n = paths.len() as f64;
    g.iter_mut().for_each(|a| *a /= n);
    Ok((value / n, g))
}

struct Masked<'a> {
    f: &'a Functional,
    paths: &'a [WienerPath],
    cfg: &'a OptConfig,
    third: usize,
}

impl Masked<'_> {
    fn eval(&self, policy: &FeedbackDrift) -> Result<(f64, Vec<f64>)> {
        let (v, mut g) = feedback_objective(self.f, policy, self.paths, true)?;
        if !self.cfg.mass_feedback {
            g[self.third..2 * self.third].iter_mut().for_each(|x| *x = 0.0);
        }
        if !self.cfg.descent_feedback {
            g[2 * self.third..].iter_mut().for_each(|x| *x = 0.0);
        }
        Ok((v, g))
    }
}

fn with_params(policy: &FeedbackDrift, p: &[f64]) -> FeedbackDrift {
    let mut c = policy.clone();
    c.set_params(p);
    c
}

/// Returns `(policy, value, accepted steps)`.
fn run_momentum(obj: &Masked, mut policy: FeedbackDrift) -> Result<(FeedbackDrift, f64, usize)> {
    let cfg = obj.cfg;
    let (mut value, mut grad) = obj.eval(&policy)?;
    let mut params = policy.params();
    let mut vel = vec![0.0; params.len()];
    let mut lr = cfg.lr;
    let mut iterations = 0;
    let mut fails = 0;
    while iterations < cfg.iters && fails < 30 {
        let dir: Vec<f64> = vel.iter().zip(&grad).map(|(v, g)| cfg.momentum * v - lr * g).collect();
        let trial: Vec<f64> = params.iter().zip(&dir).map(|(p, d)| p + d).collect();
        let cand = with_params(&policy, &trial);
        let (tv, tg) = obj.eval(&cand)?;
        if tv.is_finite() && tv < value {
            params = trial;
            policy = cand;
            vel = dir;
            value = tv;
            grad = tg;
            lr *= 1.1;
            fails = 0;
            iterations += 1;
        } else {
            lr *= 0.5;
            vel.iter_mut().for_each(|v| *v = 0.0);
            fails += 1;
        }
    }
    if iterations == 0 && grad.iter().map(|g| g * g).sum::<f64>().sqrt() > 1e-8 {
        return Err(Error::Numerical("drift optimization stalled: the line search never decreased the objective".into()));
    }
    Ok((policy, value, iterations))
}

/// Adam with a fixed step; keeps the best iterate and halves the step after a non-finite value.
fn run_adam(obj: &Masked, policy: FeedbackDrift) -> Result<(FeedbackDrift, f64, usize)> {
    const B1: f64 = 0.9;
    const B2: f64 = 0.999;
    let cfg = obj.cfg;
    let mut x = policy.params();
    let mut best = (x.clone(), f64::INFINITY);
    let (mut m, mut v) = (vec![0.0; x.len()], vec![0.0; x.len()]);
    let mut lr = cfg.lr;
    let mut t = 0;
    let mut improved = 0usize;
    for _ in 0..=cfg.iters {
        let (val, g) = obj.eval(&with_params(&policy, &x))?;
        if !val.is_finite() {
            lr *= 0.5;
            x = best.0.clone();
            m.iter_mut().chain(v.iter_mut()).for_each(|z| *z = 0.0);
            t = 0;
            continue;
        }
        if val < best.1 {
            best = (x.clone(), val);
            improved += 1;
        }
        t += 1;
        let (c1, c2) = (1.0 - B1.powi(t), 1.0 - B2.powi(t));
        for i in 0..x.len() {
            m[i] = B1 * m[i] + (1.0 - B1) * g[i];
            v[i] = B2 * v[i] + (1.0 - B2) * g[i] * g[i];
            x[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + 1e-8);
        }
    }
    if !best.1.is_finite() {
        return Err(Error::Numerical("drift optimization produced no finite objective".into()));
    }
    Ok((with_params(&policy, &best.0), best.1, improved.saturating_sub(1)))
}

/// Minimizes the objective over feedback drifts on a fixed Wiener ensemble, then
/// evaluates the result on an independent one.
pub fn optimize_drift(f: &Functional, cfg: &OptConfig, seed: u64) -> Result<OptimizedDrift> {
    if cfg.intervals < 4 {
        return Err(Error::Config("the drift needs at least 4 time intervals".into()));
    }
    if cfg.paths == 0 || cfg.eval_paths < 2 {
        return Err(Error::Config("need training paths and at least two evaluation paths".into()));
    }
    let paths: Vec<WienerPath> = (0..cfg.paths)
        .map(|p| fields::sample_y_path(f.cutoff(), f.shape(), cfg.intervals, seed, p as u64))
        .collect::<Result<_>>()?;
    let start = FeedbackDrift::zero(f.cutoff(), f.shape(), cfg.intervals);
    let obj = Masked { f, paths: &paths, cfg, third: start.params().len() / 3 };
    let (policy, value, iterations) = match cfg.optimizer {
        Optimizer::Momentum => run_momentum(&obj, start)?,
        Optimizer::Adam => run_adam(&obj, start)?,
    };
    let stalled = iterations == 0;
    let eval_first = cfg.paths as u64 + 1_000_000;
    let bound = bd_objective(f, &DriftPolicy::Feedback(policy.clone()), cfg.eval_paths, eval_first, cfg.intervals, seed)?;
    let baseline = bd_objective(f, &DriftPolicy::Zero, cfg.eval_paths, eval_first, cfg.intervals, seed)?;
    Ok(OptimizedDrift { policy, train_value: value, bound, baseline, iterations, stalled })
}
