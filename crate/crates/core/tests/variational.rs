use hartree_core::fields;
use hartree_core::lattice::{self, Shape};
use hartree_core::renorm::{PotentialParams, RenormTable};
use hartree_core::variational::{self, DriftPath, DriftPolicy, FeedbackDrift, Functional, OptConfig};
use hartree_core::{Estimate, FourierField};

fn smooth(n: usize, seed: u64) -> FourierField {
    fields::sample_mu(&fields::GaussianSpec::new(n, 1.5, seed))
}

#[test]
fn adjoint_gradient_matches_differences() {
    let table = RenormTable::ball(3, 1.5).unwrap();
    let f = Functional::Gibbs { params: PotentialParams { a: 0.3, gamma: 2.5, ..PotentialParams::defocusing(1.5) }, table };
    let paths: Vec<_> = (0..3).map(|p| fields::sample_y_path(3, Shape::Ball, 4, 1, p).unwrap()).collect();
    let mut pol = FeedbackDrift::zero(3, Shape::Ball, 4);
    let mut p = pol.params();
    for (i, x) in p.iter_mut().enumerate() {
        *x = 0.05 * ((i * 7 % 11) as f64 - 5.0) / 5.0;
    }
    pol.set_params(&p);
    let (_, g) = variational::feedback_objective(&f, &pol, &paths, true).unwrap();
    for i in (0..p.len()).step_by(5) {
        let e = 1e-6;
        let mut q = p.clone();
        q[i] += e;
        let mut a = pol.clone();
        a.set_params(&q);
        let vp = variational::feedback_objective(&f, &a, &paths, false).unwrap().0;
        q[i] -= 2.0 * e;
        a.set_params(&q);
        let vm = variational::feedback_objective(&f, &a, &paths, false).unwrap().0;
        let fd = (vp - vm) / (2.0 * e);
        assert!((fd - g[i]).abs() <= 1e-5 * (1.0 + g[i].abs()), "coefficient {i}: {fd} vs {}", g[i]);
    }
}

#[test]
fn drift_builder_rejects_anticipation() {
    let path = fields::sample_y_path(2, Shape::Ball, 4, 0, 0).unwrap();
    let err = variational::build_adapted(&path, |past| Ok(past.increment(past.interval())?.clone()));
    assert!(err.is_err());
    let ok = variational::build_adapted(&path, |past| {
        Ok(if past.interval() == 0 { FourierField::zeros(2, Shape::Ball, true) } else { past.increment(past.interval() - 1)?.clone() })
    })
    .unwrap();
    assert!(ok.is_adapted());
}

#[test]
fn integral_of_constant_drift() {
    let f = smooth(4, 1);
    let theta = DriftPath::constant(&f.multiplier(lattice::bracket), 8);
    assert!(variational::i_theta(&theta).sub(&f).max_abs() < 1e-14);
    let zero = DriftPath::zeros(4, Shape::Ball, 8);
    assert_eq!(variational::i_theta(&zero).max_abs(), 0.0);
}

#[test]
fn cauchy_schwarz_in_time() {
    for seed in 0..100 {
        let values: Vec<FourierField> = (0..6).map(|k| smooth(3, 100 * seed + k)).collect();
        let d = DriftPath::from_values(values).unwrap();
        let lhs = variational::i_theta(&d).sobolev_sq(1.0);
        assert!(lhs <= 2.0 * d.cost() * (1.0 + 1e-12), "seed {seed}");
    }
    let c = DriftPath::constant(&smooth(3, 5), 6);
    let lhs = variational::i_theta(&c).sobolev_sq(1.0);
    assert!((lhs - 2.0 * c.cost()).abs() < 1e-12 * lhs);
}

#[test]
fn zero_drift_matches_wick_sum() {
    let n = 3;
    let table = RenormTable::ball(n, 1.5).unwrap();
    let f = Functional::Gibbs { params: PotentialParams::defocusing(1.5), table };
    let got = variational::bd_objective(&f, &DriftPolicy::Zero, 4000, 0, 4, 2).unwrap();
    let want: f64 = lattice::modes(n, Shape::Ball).iter().map(|&m| 0.5 / lattice::bracket_sq(m).powi(2)).sum();
    assert!(got.z_score(&Estimate::exact(want)) < 3.0, "{got:?} vs {want}");
}

#[test]
fn quadratic_toy_reaches_the_minimum() {
    let coeffs = FourierField::from_symbol(3, Shape::Ball, |_| 1.0);
    let f = Functional::Quadratic { coeffs };
    let exact = f.exact_free_energy().unwrap();
    let cfg = OptConfig { intervals: 8, paths: 400, eval_paths: 2000, iters: 100, ..OptConfig::default() };
    let r = variational::optimize_drift(&f, &cfg, 3).unwrap();
    assert!((r.bound.value - exact).abs() <= 0.01 * exact.abs(), "{:?} vs {exact}", r.bound);
    assert!(r.bound.value >= exact - 3.0 * r.bound.se);
    assert!(r.bound.value <= r.baseline.value);
}

#[test]
fn optimizer_validates_its_grid() {
    let f = Functional::Quadratic { coeffs: FourierField::from_symbol(2, Shape::Ball, |_| 1.0) };
    assert!(variational::optimize_drift(&f, &OptConfig { intervals: 2, ..OptConfig::default() }, 0).is_err());
}

#[test]
fn cutoff_statistic_matches_full_witness() {
    let table = RenormTable::ball(8, 1.5).unwrap();
    let full = variational::sample_witness(&table, 4, 6, 2, 9).unwrap();
    let fast = variational::sample_cutoff_statistic(8, Shape::Ball, 4, 6, 2, 9).unwrap();
    for (a, b) in full.s.iter().zip(&fast) {
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }
}

#[test]
fn f_m_is_normalized() {
    for m in [8usize, 16, 32, 64] {
        let f = variational::build_f_m(m, Shape::Ball).unwrap();
        assert!((f.norm_sq() - 1.0).abs() <= 10.0 / (m * m) as f64, "M = {m}: {}", f.norm_sq());
    }
    assert!(variational::build_f_m(3, Shape::Ball).is_err());
}

#[test]
fn witness_needs_an_even_grid() {
    let path = fields::sample_y_path(8, Shape::Ball, 3, 0, 0).unwrap();
    assert!(variational::witness_drift(&path, 8).is_err());
}
