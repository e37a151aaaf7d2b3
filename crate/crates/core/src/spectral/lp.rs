//! Littlewood–Paley blocks, Bony paraproducts and Besov-type norms.

use super::fft::fast_side;
use super::field::FourierField;
use super::grid::{self, product_side, ProductGrid};
use crate::error::Result;
use crate::lattice::{self, Shape};

const PLATEAU: f64 = 1.25;
const EDGE: f64 = 1.6;

#[inline]
fn smooth_step(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Radial bump: `1` on `[0, 5/4]`, `0` on `[8/5, ∞)`, smooth in between.
pub fn bump(r: f64) -> f64 {
    let r = r.abs();
    if r <= PLATEAU {
        return 1.0;
    }
    if r >= EDGE {
        return 0.0;
    }
    let a = smooth_step(EDGE - r);
    let b = smooth_step(r - PLATEAU);
    a / (a + b)
}

/// Block multiplier `φ_j(r)`; the blocks telescope so `Σ_j φ_j ≡ 1`.
pub fn phi(j: usize, r: f64) -> f64 {
    if j == 0 {
        bump(r)
    } else {
        let s = (1u64 << j) as f64;
        bump(r / s) - bump(2.0 * r / s)
    }
}

/// `Σ_{j ≤ m} φ_j(r)`.
pub fn phi_partial(m: isize, r: f64) -> f64 {
    if m < 0 {
        0.0
    } else {
        bump(r / (1u64 << m) as f64)
    }
}

/// Largest block index that can be active at radius `≤ r`.
pub fn max_block(r: f64) -> usize {
    let mut j = 0usize;
    while (1u64 << (j + 1)) as f64 * 0.625 < r {
        j += 1;
    }
    j
}

fn max_radius(u: &FourierField) -> f64 {
    let n = u.cutoff() as f64;
    match u.shape() {
        Shape::Ball => n,
        Shape::Cube => n * 3f64.sqrt(),
    }
}

/// `Σ_{|k-j| ≤ 2} φ_k(r)`.
pub fn phi_near(j: usize, r: f64) -> f64 {
    phi_partial(j as isize + 2, r) - phi_partial(j as isize - 3, r)
}

/// Weight of the pair `(a, b)` in the resonant product `f ⊜ g`.
pub fn resonant_weight(a: f64, b: f64) -> f64 {
    let jmax = max_block(a.max(b)) + 3;
    (0..=jmax).map(|j| phi(j, a) * phi_near(j, b)).sum()
}

/// Weight of the pair `(a, b)` in the low-high product `f ≺ g` (`j < k-2`).
pub fn low_high_weight(a: f64, b: f64) -> f64 {
    let kmax = max_block(a.max(b)) + 3;
    (0..=kmax).map(|k| phi_partial(k as isize - 3, a) * phi(k, b)).sum()
}

pub fn lp_block(u: &FourierField, j: usize) -> FourierField {
    u.multiplier(|n| phi(j, lattice::norm(n)))
}

/// Active blocks of `u`.
pub fn block_range(u: &FourierField) -> std::ops::RangeInclusive<usize> {
    0..=max_block(max_radius(u))
}

/// The three Bony pieces `(f ≺ g, f ⊜ g, f ≻ g)`, each exact on `|n| ≤ N_f + N_g`.
pub fn paraproducts(f: &FourierField, g: &FourierField) -> Result<(FourierField, FourierField, FourierField)> {
    let out = f.cutoff() + g.cutoff();
    let side = product_side(f.cutoff(), g.cutoff(), out);
    let jf = *block_range(f).end();
    let jg = *block_range(g).end();
    let mut lo = ProductGrid::new(side)?;
    for k in 3..=jg {
        let fl = f.multiplier(|n| phi_partial(k as isize - 3, lattice::norm(n)));
        let gk = lp_block(g, k);
        lo.add_product(&fl, &gk, 1.0)?;
    }
    let mut hi = ProductGrid::new(side)?;
    for j in 3..=jf {
        let fj = lp_block(f, j);
        let gl = g.multiplier(|n| phi_partial(j as isize - 3, lattice::norm(n)));
        hi.add_product(&fj, &gl, 1.0)?;
    }
    let (lo_hi, hi_lo) = grid::finish_pair(lo, hi, out, f.shape());
    let res = resonant_product(f, g, out)?;
    Ok((lo_hi, res, hi_lo))
}

/// `f ⊜ g` restricted to `|n| ≤ out`.
pub fn resonant_product(f: &FourierField, g: &FourierField, out: usize) -> Result<FourierField> {
    let side = product_side(f.cutoff(), g.cutoff(), out);
    let jf = *block_range(f).end();
    let jg = *block_range(g).end();
    let mut acc = ProductGrid::new(side)?;
    for j in 0..=jf.min(jg + 2) {
        let fj = lp_block(f, j);
        let gj = g.multiplier(|n| phi_near(j, lattice::norm(n)));
        acc.add_product(&fj, &gj, 1.0)?;
    }
    Ok(acc.finish(out, f.shape()))
}

/// `‖(2^{sj} ‖P_j u‖_{L^p})_j‖_{ℓ^q}` with `L^p` evaluated on a twice oversampled grid.
pub fn besov_norm(u: &FourierField, s: f64, p: f64, q: f64) -> Result<f64> {
    let side = fast_side(4 * u.cutoff() + 2);
    let mut terms = Vec::new();
    let blocks: Vec<usize> = block_range(u).collect();
    for pair in blocks.chunks(2) {
        let a = lp_block(u, pair[0]);
        let b = if pair.len() > 1 { lp_block(u, pair[1]) } else { FourierField::zeros(0, u.shape(), true) };
        let (ga, gb) = grid::to_grid_pair(&a, &b, side)?;
        terms.push(2f64.powf(s * pair[0] as f64) * ga.lp_norm(p));
        if pair.len() > 1 {
            terms.push(2f64.powf(s * pair[1] as f64) * gb.lp_norm(p));
        }
    }
    Ok(if q.is_infinite() {
        terms.iter().fold(0.0, |m: f64, &t| m.max(t))
    } else {
        terms.iter().map(|t| t.powf(q)).sum::<f64>().powf(1.0 / q)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_profile() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(1.25), 1.0);
        assert_eq!(bump(1.6), 0.0);
        let mid = bump(1.425);
        assert!((mid - 0.5).abs() < 1e-12);
    }

    #[test]
    fn blocks_partition_unity() {
        for i in 0..400 {
            let r = i as f64 * 0.37;
            let s: f64 = (0..=max_block(r) + 2).map(|j| phi(j, r)).sum();
            assert!((s - 1.0).abs() < 1e-14, "r={r} s={s}");
        }
    }

    #[test]
    fn block_support_at_1024() {
        let active: Vec<usize> = (0..16).filter(|&j| phi(j, 1024.0) != 0.0).collect();
        assert!(active.iter().all(|j| (9..=11).contains(j)));
        assert_eq!(active, vec![10]);
    }

    #[test]
    fn weights_sum_to_one() {
        for &(a, b) in &[(0.0, 3.0), (5.0, 5.5), (1.0, 64.0), (40.0, 2.0), (17.0, 9.0)] {
            let w = resonant_weight(a, b) + low_high_weight(a, b) + low_high_weight(b, a);
            assert!((w - 1.0).abs() < 1e-13);
        }
    }
}
