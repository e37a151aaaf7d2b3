//! The experiments behind each subcommand.

use std::fs::File;
use std::io::BufReader;

use hartree_core::dynamics::{self, IntegratorConfig, InvarianceConfig, McmcConfig};
use hartree_core::fields::{self, GaussianSpec};
use hartree_core::lattice::{self, Shape};
use hartree_core::parallel::par_map;
use hartree_core::rng::{purpose, StreamKey};
use hartree_core::stochwave::{self, KernelOperator, ResonantContext, Split};
use hartree_core::variational::{self, Functional, OptConfig, Optimizer};
use hartree_core::{energy, renorm, spectral, stats, Error, FourierField, PotentialParams, RenormTable, Result};
use serde_json::json;

use crate::config::experiment_config;
use crate::output::{Cell, Outputs};

fn shape(s: &str) -> Result<Shape> {
    match s {
        "ball" => Ok(Shape::Ball),
        "cube" => Ok(Shape::Cube),
        _ => Err(Error::Config(format!("shape must be ball or cube, got {s}"))),
    }
}

fn potential(beta: f64, sigma: f64, a: f64, gamma: f64) -> Result<PotentialParams> {
    let p = PotentialParams { beta, sigma, a, gamma };
    p.validate()?;
    Ok(p)
}

fn mode_cells(n: lattice::Mode) -> Vec<Cell> {
    n.iter().map(|&c| Cell::from(c)).collect()
}

fn shell_rows(samples: &[FourierField]) -> Vec<Vec<Cell>> {
    stochwave::shell_means(samples)
        .into_iter()
        .map(|(r, e)| vec![r.into(), e.value.into(), e.se.into()])
        .collect()
}

const SHELL_HEADER: [&str; 3] = ["radius", "mean_abs2", "SE"];

experiment_config!(RenormTableConfig, RenormTableFlags {
    n: usize = 16, "N";
    beta: f64 = 1.5, "beta";
    shape: String = "ball".into(), "shape";
    /// Paths for the Monte Carlo estimate of C_N (0 skips it).
    c_paths: usize = 0, "c-paths";
    timesteps: usize = 32, "timesteps";
    seed: u64 = 0, "seed";
});

pub fn renorm_table(cfg: &RenormTableConfig, out: &mut Outputs) -> Result<()> {
    let mut table = RenormTable::new(cfg.n, cfg.beta, shape(&cfg.shape)?)?;
    if cfg.c_paths > 0 {
        let c = renorm::c_n(&table, cfg.c_paths, cfg.timesteps, cfg.seed)?;
        table = table.with_c_n(c);
    }
    out.json("renorm.json", &json!({ "config": cfg, "table": table }))?;
    let rows = table.kappa_rows().into_iter().map(|(n, k)| {
        let mut r = mode_cells(n);
        r.push(k.into());
        r
    });
    out.csv("kappa.csv", &["n1", "n2", "n3", "kappa"], rows)
}

experiment_config!(SampleConfig, SampleFlags {
    n: usize = 8, "N";
    /// Regularity s of the Gaussian measure (variances ⟨n⟩^{-2s}).
    s: f64 = 1.0, "s";
    samples: usize = 16, "samples";
    seed: u64 = 0, "seed";
});

pub fn sample(cfg: &SampleConfig, out: &mut Outputs) -> Result<()> {
    if cfg.samples < 2 {
        return Err(Error::Config("need at least two samples".into()));
    }
    let draws = par_map(cfg.samples, |i| {
        fields::sample_mu(&GaussianSpec::new(cfg.n, cfg.s, cfg.seed).replica(i as u64))
    });
    for (i, u) in draws.iter().enumerate() {
        out.snapshot(&format!("snapshots/sample_{i:05}.hp43"), u)?;
    }
    let rows = lattice::modes(cfg.n, Shape::Ball).into_iter().map(|n| {
        let v: Vec<f64> = draws.iter().map(|u| u.get(n).norm_sqr()).collect();
        let e = stats::mean_se(&v);
        let mut r = mode_cells(n);
        r.extend([e.value.into(), e.se.into(), lattice::bracket_sq(n).powf(-cfg.s).into()]);
        r
    });
    out.csv("variances.csv", &["n1", "n2", "n3", "variance", "SE", "expected"], rows)
}

experiment_config!(EnergyConfig, EnergyFlags {
    snapshot: String = String::new(), "snapshot";
    /// Renormalization cutoff; 0 uses the cutoff stored in the snapshot.
    n: usize = 0, "N";
    beta: f64 = 1.5, "beta";
    sigma: f64 = -1.0, "sigma";
    a: f64 = 0.0, "A";
    gamma: f64 = 3.0, "gamma";
});

pub fn energy(cfg: &EnergyConfig, out: &mut Outputs) -> Result<()> {
    if cfg.snapshot.is_empty() {
        return Err(Error::Config("--snapshot is required".into()));
    }
    let u = spectral::read_snapshot(BufReader::new(File::open(&cfg.snapshot)?))?;
    let n = if cfg.n == 0 { u.cutoff() } else { cfg.n };
    let table = RenormTable::ball(n, cfg.beta)?;
    let b = energy::energy_breakdown(&u, &potential(cfg.beta, cfg.sigma, cfg.a, cfg.gamma)?, &table)?;
    out.json("energy.json", &json!({ "config": cfg, "breakdown": b }))
}

experiment_config!(ObjectsConfig, ObjectsFlags {
    n: usize = 8, "N";
    beta: f64 = 1.5, "beta";
    /// Output cutoff of the resonant objects.
    n_out: usize = 8, "Nout";
    replicas: usize = 64, "replicas";
    /// Time lag t − t′ of the paracontrolled kernel.
    tau: f64 = 0.5, "tau";
    seed: u64 = 0, "seed";
});

pub fn objects(cfg: &ObjectsConfig, out: &mut Outputs) -> Result<()> {
    let ctx = ResonantContext::new(RenormTable::ball(cfg.n, cfg.beta)?, cfg.n_out)?;
    let per: Vec<Result<[FourierField; 5]>> = par_map(cfg.replicas, |r| {
        let pair = stochwave::psi_pair(cfg.n, Shape::Ball, cfg.tau, cfg.seed, r as u64);
        let obj = ctx.pieces(&pair.late)?;
        let a = stochwave::frak_a(&pair, cfg.n_out)?;
        Ok([pair.late.project(cfg.n_out), obj.z, obj.z1, obj.z2, a])
    });
    let per: Vec<[FourierField; 5]> = per.into_iter().collect::<Result<_>>()?;
    for (k, name) in ["psi", "z", "z1", "z2", "frak_a"].iter().enumerate() {
        let col: Vec<FourierField> = per.iter().map(|p| p[k].clone()).collect();
        out.csv(&format!("{name}.csv"), &SHELL_HEADER, shell_rows(&col))?;
    }
    Ok(())
}

experiment_config!(ParaopConfig, ParaopFlags {
    n: usize = 8, "N";
    n_out: usize = 8, "Nout";
    /// Cutoff of the test inputs in the norm estimate.
    n_w: usize = 8, "Nw";
    tau: f64 = 0.5, "tau";
    theta: f64 = 0.2, "theta";
    c0: f64 = 0.0, "c0";
    replicas: usize = 8, "replicas";
    iters: usize = 20, "iters";
    seed: u64 = 0, "seed";
});

pub fn paraop(cfg: &ParaopConfig, out: &mut Outputs) -> Result<()> {
    let split = Split { theta: cfg.theta, c0: cfg.c0 };
    split.validate()?;
    let modes = lattice::half_modes(cfg.n_out, Shape::Ball);
    let terms: Vec<Result<stochwave::Counterterms>> =
        par_map(modes.len(), |i| stochwave::kernel_counterterms(modes[i], cfg.tau, 0.0, split, cfg.n, Shape::Ball));
    let mut rows = Vec::with_capacity(modes.len());
    for (n, t) in modes.iter().zip(terms) {
        let t = t?;
        let mut r = mode_cells(*n);
        r.extend([t.a3.into(), t.a4.into(), t.a5.into(), t.total().into()]);
        rows.push(r);
    }
    out.csv("kernel.csv", &["n1", "n2", "n3", "A3", "A4", "A5", "total"], rows)?;
    let norms: Vec<Result<f64>> = par_map(cfg.replicas, |r| {
        let pair = stochwave::psi_pair(cfg.n, Shape::Ball, cfg.tau, cfg.seed, r as u64);
        KernelOperator::new(&pair, split, cfg.n_out)?.norm_estimate(cfg.n_w, cfg.iters, cfg.seed.wrapping_add(r as u64))
    });
    let norms: Vec<f64> = norms.into_iter().collect::<Result<_>>()?;
    let est = stats::mean_se(&norms);
    out.csv("norms.csv", &["replica", "norm"], norms.iter().enumerate().map(|(i, &x)| vec![i.into(), x.into()]))?;
    out.json("paraop.json", &json!({ "config": cfg, "mean_norm": est }))
}

experiment_config!(EvolveConfig, EvolveFlags {
    n: usize = 4, "N";
    beta: f64 = 1.5, "beta";
    sigma: f64 = -1.0, "sigma";
    a: f64 = 0.0, "A";
    gamma: f64 = 3.0, "gamma";
    /// wave (Strang splitting) or heat (exponential Euler).
    scheme: String = "wave".into(), "scheme";
    h: f64 = 0.01, "h";
    t_end: f64 = 10.0, "T";
    record_every: usize = 10, "record-every";
    renormalized: bool = true, "renormalized";
    seed: u64 = 0, "seed";
});

fn integrator(scheme: &str, h: f64, t_end: f64) -> Result<IntegratorConfig> {
    match scheme {
        "wave" => Ok(IntegratorConfig::wave(h, t_end)),
        "heat" => Ok(IntegratorConfig::heat(h, t_end)),
        _ => Err(Error::Config(format!("scheme must be wave or heat, got {scheme}"))),
    }
}

pub fn evolve(cfg: &EvolveConfig, out: &mut Outputs) -> Result<()> {
    let params = potential(cfg.beta, cfg.sigma, cfg.a, cfg.gamma)?;
    let table = RenormTable::ball(cfg.n, cfg.beta)?;
    let icfg = IntegratorConfig {
        record_every: cfg.record_every,
        renormalized: cfg.renormalized,
        ..integrator(&cfg.scheme, cfg.h, cfg.t_end)?
    };
    let key = StreamKey::new(cfg.seed, 0, purpose::WAVE_NOISE);
    let init = stochwave::stationary_pair(cfg.n, Shape::Ball, cfg.seed, 0);
    let mut rows: Vec<Vec<Cell>> = Vec::new();
    let mut record = |t: f64, u: &FourierField| -> Result<()> {
        rows.push(vec![t.into(), "wick_mass".into(), energy::wick_mass(u, &table).into()]);
        rows.push(vec![t.into(), "R_N".into(), energy::r_n(u, &table)?.into()]);
        Ok(())
    };
    if cfg.scheme == "wave" {
        let mut energies = Vec::new();
        let last = dynamics::evolve_sdnlw(&init, &params, &table, &icfg, key, |s| {
            record(s.time, &s.pos)?;
            energies.push((s.time, dynamics::hamiltonian(s, &params, &table)?));
            Ok(())
        })?;
        rows.extend(energies.into_iter().map(|(t, e)| vec![t.into(), "hamiltonian".into(), e.into()]));
        out.snapshot("final_position.hp43", &last.pos)?;
        out.snapshot("final_velocity.hp43", &last.vel)?;
    } else {
        let last = dynamics::evolve_snlh(&init.pos, &params, &table, &icfg, key, |t, u| record(t, u))?;
        out.snapshot("final_position.hp43", &last)?;
    }
    out.csv("trajectory.csv", &["t", "observable", "value"], rows)
}

experiment_config!(InvarianceCliConfig, InvarianceFlags {
    n: usize = 4, "N";
    beta: f64 = 1.5, "beta";
    sigma: f64 = -1.0, "sigma";
    a: f64 = 0.0, "A";
    gamma: f64 = 3.0, "gamma";
    scheme: String = "wave".into(), "scheme";
    h: f64 = 0.01, "h";
    t_end: f64 = 100.0, "T";
    trajectories: usize = 4, "trajectories";
    burn_time: f64 = 5.0, "burn-time";
    richardson: bool = false, "richardson";
    batches: usize = 20, "batches";
    renormalized: bool = true, "renormalized";
    mcmc_samples: usize = 4000, "mcmc-samples";
    mcmc_thin: usize = 10, "mcmc-thin";
    mcmc_burn_in: usize = 5000, "mcmc-burn-in";
    seed: u64 = 0, "seed";
});

pub fn invariance(cfg: &InvarianceCliConfig, out: &mut Outputs) -> Result<()> {
    let params = potential(cfg.beta, cfg.sigma, cfg.a, cfg.gamma)?;
    let table = RenormTable::ball(cfg.n, cfg.beta)?;
    let icfg = InvarianceConfig {
        integrator: IntegratorConfig { renormalized: cfg.renormalized, ..integrator(&cfg.scheme, cfg.h, cfg.t_end)? },
        trajectories: cfg.trajectories,
        burn_time: cfg.burn_time,
        richardson: cfg.richardson,
        batches: cfg.batches,
    };
    let mcmc = McmcConfig { samples: cfg.mcmc_samples, thin: cfg.mcmc_thin, burn_in: cfg.mcmc_burn_in, ..McmcConfig::default() };
    let report = dynamics::invariance_test(&params, &table, &icfg, &mcmc, cfg.seed)?;
    println!("invariance verdict: {:?}", report.verdict);
    let rows = report.comparisons.iter().map(|c| {
        vec![
            c.name.as_str().into(),
            c.dynamics.value.into(),
            c.dynamics.se.into(),
            c.reference.value.into(),
            c.reference.se.into(),
            c.z.into(),
        ]
    });
    out.csv("comparisons.csv", &["observable", "dynamics", "SE", "reference", "reference_SE", "z"], rows)?;
    out.json("invariance.json", &json!({ "config": cfg, "report": report }))
}

experiment_config!(PartitionConfig, PartitionFlags {
    n: usize = 4, "N";
    beta: f64 = 1.5, "beta";
    sigma: f64 = -1.0, "sigma";
    a: f64 = 0.0, "A";
    gamma: f64 = 3.0, "gamma";
    intervals: usize = 16, "intervals";
    paths: usize = 200, "paths";
    eval_paths: usize = 2000, "eval-paths";
    iters: usize = 120, "iters";
    /// adam or momentum.
    optimizer: String = "adam".into(), "optimizer";
    lr: f64 = 0.05, "lr";
    /// Samples for the direct estimate of −log Z (0 skips it).
    direct_samples: usize = 20000, "direct-samples";
    seed: u64 = 0, "seed";
});

pub fn partition(cfg: &PartitionConfig, out: &mut Outputs) -> Result<()> {
    let params = potential(cfg.beta, cfg.sigma, cfg.a, cfg.gamma)?;
    let f = Functional::Gibbs { params, table: RenormTable::ball(cfg.n, cfg.beta)? };
    let optimizer = match cfg.optimizer.as_str() {
        "adam" => Optimizer::Adam,
        "momentum" => Optimizer::Momentum,
        s => return Err(Error::Config(format!("optimizer must be adam or momentum, got {s}"))),
    };
    let opt = OptConfig {
        intervals: cfg.intervals,
        paths: cfg.paths,
        eval_paths: cfg.eval_paths,
        iters: cfg.iters,
        optimizer,
        lr: cfg.lr,
        ..OptConfig::default()
    };
    let res = variational::optimize_drift(&f, &opt, cfg.seed)?;
    let direct = if cfg.direct_samples > 0 {
        Some(variational::free_energy_direct(&f, cfg.direct_samples, cfg.seed.wrapping_add(1))?)
    } else {
        None
    };
    println!("upper bound on -log Z: {:.6} ± {:.6}", res.bound.value, res.bound.se);
    out.json(
        "partition.json",
        &json!({
            "config": cfg,
            "bound": res.bound,
            "baseline": res.baseline,
            "train_value": res.train_value,
            "iterations": res.iterations,
            "stalled": res.stalled,
            "direct": direct,
            "policy": res.policy,
        }),
    )
}

experiment_config!(WitnessConfig, WitnessFlags {
    beta: f64 = 1.5, "beta";
    sigma: f64 = 1.0, "sigma";
    #[arg(value_delimiter = ',')]
    ms: Vec<usize> = vec![8, 16, 32], "M";
    paths: usize = 400, "paths";
    seed: u64 = 0, "seed";
});

pub fn witness(cfg: &WitnessConfig, out: &mut Outputs) -> Result<()> {
    let mut reports = Vec::new();
    for &m in &cfg.ms {
        let table = RenormTable::ball(2 * m, cfg.beta)?;
        reports.push(variational::witness_certificate(cfg.sigma, &table, m, cfg.paths, cfg.seed)?);
    }
    let rows = reports.iter().map(|r| {
        vec![
            r.m.into(),
            r.q_theta0.value.into(),
            r.q_theta0.se.into(),
            r.drift_cost.value.into(),
            r.drift_cost.se.into(),
            r.cutoff_prob.value.into(),
            r.certificate.value.into(),
            r.cutoff_prob.se.into(),
            r.certificate.se.into(),
        ]
    });
    out.csv(
        "witness.csv",
        &["M", "Q_Theta0", "SE", "drift_cost", "SE", "cutoff_prob", "certificate", "cutoff_prob_SE", "certificate_SE"],
        rows,
    )?;
    out.json("witness.json", &json!({ "config": cfg, "reports": reports }))
}

experiment_config!(PhaseScanConfig, PhaseScanFlags {
    #[arg(value_delimiter = ',')]
    ms: Vec<usize> = vec![8, 16, 32], "M";
    #[arg(value_delimiter = ',')]
    sigmas: Vec<f64> = vec![0.25, 0.5, 0.75, 1.0, 1.5], "sigmas";
    paths: usize = 200, "paths";
    seed: u64 = 0, "seed";
});

pub fn phase_scan(cfg: &PhaseScanConfig, out: &mut Outputs) -> Result<()> {
    let mut samples = Vec::new();
    for &m in &cfg.ms {
        let table = RenormTable::ball(2 * m, 2.0)?;
        samples.push(variational::sample_witness(&table, m, cfg.paths, 2, cfg.seed)?);
    }
    let scan = variational::phase_scan_beta2(&samples, &cfg.sigmas)?;
    let rows = scan.rows.iter().map(|r| vec![r.sigma.into(), r.m.into(), r.certificate.value.into(), r.certificate.se.into()]);
    out.csv("phase_scan.csv", &["sigma", "M", "certificate", "SE"], rows)?;
    let coef = scan.coefficients.iter().map(|(s, e)| vec![(*s).into(), e.value.into(), e.se.into()]);
    out.csv("coefficients.csv", &["sigma", "coefficient", "SE"], coef)?;
    out.json(
        "phase_scan.json",
        &json!({ "config": cfg, "c1": scan.c1, "c2": scan.c2, "threshold": scan.threshold }),
    )
}
