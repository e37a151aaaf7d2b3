use approx::assert_relative_eq;
use hartree_core::lattice::{self, Shape};
use hartree_core::renorm::{self, RenormTable};
use hartree_core::FourierField;

#[test]
fn closed_form_examples() {
    assert_eq!(renorm::sigma_n(0, Shape::Ball), 1.0);
    assert_relative_eq!(renorm::sigma_n(1, Shape::Ball), 4.0, max_relative = 1e-15);
    assert_relative_eq!(renorm::bessel_symbol([1, 0, 0], 2.0), 0.5, max_relative = 1e-15);
    assert_eq!(renorm::bessel_symbol([0, 0, 0], 0.7), 1.0);
    let k = renorm::kappa_n(1, 2.0, Shape::Ball).unwrap();
    assert_relative_eq!(k.get([0, 0, 0]).re, 1.5, max_relative = 1e-12);
    let c = renorm::apply_v0(&FourierField::constant(2.5, Shape::Ball), 1.5);
    assert_eq!(c.max_abs(), 0.0);
}

#[test]
fn singularity_constants_match_direct_sum() {
    let mut a = 0.0;
    let mut count = 0;
    for x in -2i32..=2 {
        for y in -2i32..=2 {
            for z in -2i32..=2 {
                if x * x + y * y + z * z <= 4 {
                    a += (1.0 + (x * x + y * y + z * z) as f64).powf(-1.5);
                    count += 1;
                }
            }
        }
    }
    assert_eq!(count, 33);
    let (an, bn) = renorm::singularity_constants(2, 0.5, Shape::Ball).unwrap();
    assert_relative_eq!(an, a, max_relative = 1e-12);
    assert_relative_eq!(bn, 2f64.ln().powf(-0.25) / a.sqrt(), max_relative = 1e-14);
}

#[test]
fn kappa_is_even() {
    let t = RenormTable::ball(6, 1.5).unwrap();
    for (n, k) in t.kappa_rows() {
        assert_relative_eq!(k, t.kappa_at(lattice::neg(n)), max_relative = 1e-13);
    }
}

#[test]
fn constants_are_monotone_in_n() {
    for beta in [0.5, 1.5, 2.5] {
        let mut prev = (0.0, 0.0, 0.0);
        for n in 1..=8 {
            let s = renorm::sigma_n(n, Shape::Ball);
            let a = renorm::alpha_n(n, beta, Shape::Ball).unwrap();
            let k = renorm::kappa_n(n, beta, Shape::Ball).unwrap().get([0, 0, 0]).re;
            assert!(s >= prev.0 && a >= prev.1 && k >= prev.2, "N = {n}, beta = {beta}");
            prev = (s, a, k);
        }
    }
}

#[test]
fn time_quadrature_of_cubic() {
    assert_eq!(renorm::cubic_time_factor(None), 0.25);
    assert_relative_eq!(renorm::cubic_time_factor(Some(400)), 0.25, max_relative = 1e-4);
}

#[test]
fn c_n_rejects_too_few_paths() {
    let t = RenormTable::ball(2, 0.5).unwrap();
    assert!(renorm::c_n(&t, 1, 8, 0).is_err());
}
