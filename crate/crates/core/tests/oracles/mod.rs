//! Direct-sum reference implementations. Deliberately naive: every sum is written
//! out over explicit frequency lists with no transforms and no symmetry reduction.

#![allow(dead_code)]

use hartree_core::lattice::{Mode, Shape};
use hartree_core::spectral::lp::{phi, phi_near};
use hartree_core::spectral::{FourierField, C64};

pub fn inside(m: Mode, n: usize, shape: Shape) -> bool {
    let r = n as i32;
    match shape {
        Shape::Ball => (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as i64 <= (n * n) as i64,
        Shape::Cube => m.iter().all(|c| c.abs() <= r),
    }
}

pub fn modes(n: usize, shape: Shape) -> Vec<Mode> {
    let r = n as i32;
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                if inside([a, b, c], n, shape) {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

pub fn nsq(m: Mode) -> f64 {
    (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64
}

pub fn br2(m: Mode) -> f64 {
    1.0 + nsq(m)
}

pub fn add(a: Mode, b: Mode) -> Mode {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn neg(a: Mode) -> Mode {
    [-a[0], -a[1], -a[2]]
}

pub fn v(m: Mode, beta: f64) -> f64 {
    br2(m).powf(-beta / 2.0)
}

pub fn v0(m: Mode, beta: f64) -> f64 {
    if m == [0, 0, 0] {
        0.0
    } else {
        v(m, beta)
    }
}

/// `Σ_{n₁+n₂=n} û(n₁)v̂(n₂)` for `n` in `shape(out)`.
pub fn product(u: &FourierField, w: &FourierField, out: usize) -> FourierField {
    let mu = modes(u.cutoff(), u.shape());
    let mw = modes(w.cutoff(), w.shape());
    let mut r = FourierField::zeros(out, u.shape(), true);
    for &a in &mu {
        let x = u.get(a);
        for &b in &mw {
            let n = add(a, b);
            if r.contains(n) {
                let y = r.get(n);
                r.set(n, y + x * w.get(b));
            }
        }
    }
    r
}

pub fn alpha(n: usize, beta: f64, shape: Shape) -> f64 {
    let ms = modes(n, shape);
    let mut s = 0.0;
    for &a in &ms {
        for &b in &ms {
            s += v0(add(a, b), beta) / (br2(a) * br2(b));
        }
    }
    s
}

pub fn kappa(n: usize, beta: f64, shape: Shape, m: Mode) -> f64 {
    modes(n, shape).into_iter().filter(|&a| add(m, a) != [0, 0, 0]).map(|a| v(add(m, a), beta) / br2(a)).sum()
}

pub fn sigma(n: usize, shape: Shape) -> f64 {
    modes(n, shape).into_iter().map(|m| 1.0 / br2(m)).sum()
}

/// `(Q₁, Q₂, Q₃, Q₄)` written term by term from the quartic decomposition of `Q_N`.
pub fn q_components(u: &FourierField, n: usize, beta: f64, shape: Shape) -> [f64; 4] {
    let ms = modes(n, shape);
    let get = |m: Mode| -> C64 {
        if inside(m, n, shape) {
            u.get(m)
        } else {
            C64::new(0.0, 0.0)
        }
    };
    let mut q1 = C64::new(0.0, 0.0);
    for &a in &ms {
        for &b in &ms {
            let ab = add(a, b);
            if ab == [0, 0, 0] {
                continue;
            }
            let uab = get(a) * get(b);
            for &c in &ms {
                let d = neg(add(ab, c));
                if add(a, c) == [0, 0, 0] || add(a, d) == [0, 0, 0] {
                    continue;
                }
                let ud = get(d);
                if ud == C64::new(0.0, 0.0) {
                    continue;
                }
                q1 += v(ab, beta) * uab * get(c) * ud;
            }
        }
    }
    let b2 = |m: Mode| get(m).norm_sqr();
    let mut q2 = 0.0;
    let mut q3 = 0.0;
    for &a in &ms {
        for &b in &ms {
            let ab = add(a, b);
            if ab == [0, 0, 0] {
                continue;
            }
            let va = b2(a) - 1.0 / br2(a);
            let vb = b2(b) - 1.0 / br2(b);
            q2 += 2.0 * v(ab, beta) * va * vb;
            q3 += 4.0 * v(ab, beta) * va / br2(b);
        }
    }
    let q4: f64 = ms.iter().filter(|&&m| m != [0, 0, 0]).map(|&m| -v(add(m, m), beta) * b2(m).powi(2)).sum();
    [q1.re, q2, q3, q4]
}

/// `Σ_{k≠0} V̂(k)|(u_N²)^(k)|² − 2α_N`.
pub fn q_n(u: &FourierField, n: usize, beta: f64, shape: Shape) -> f64 {
    let un = u.project(n);
    let s = product(&un, &un, 2 * n);
    let h: f64 = s.iter().map(|(k, x)| v0(k, beta) * x.norm_sqr()).sum();
    h - 2.0 * alpha(n, beta, shape)
}

/// `ω(a, b) = Σ_j φ_j(a)Σ_{|k−j|≤2}φ_k(b)`, summed far past any active block.
pub fn omega(a: f64, b: f64) -> f64 {
    (0..40).map(|j| phi(j, a) * phi_near(j, b)).sum()
}

/// `S_N(m) = Σ_{|n₂|≤N, m+n₂≠0} ω(|m+n₂|,|n₂|)V̂(m+n₂)⟨n₂⟩^{-2}`.
pub fn s_n(n: usize, beta: f64, shape: Shape, m: Mode) -> f64 {
    modes(n, shape)
        .into_iter()
        .map(|b| {
            let p = add(m, b);
            omega(nsq(p).sqrt(), nsq(b).sqrt()) * v0(p, beta) / br2(b)
        })
        .sum()
}

/// `D̂(t, n) = e^{-t/2} sin(t⟪n⟫)/⟪n⟫` with `⟪n⟫ = (¾ + |n|²)^{1/2}`.
pub fn d_hat(t: f64, m: Mode) -> f64 {
    let w = (0.75 + nsq(m)).sqrt();
    (-t / 2.0).exp() * (t * w).sin() / w
}

/// `σ_n(t, 0) = e^{-t/2}⟨n⟩^{-2}(cos t⟪n⟫ + sin t⟪n⟫/(2⟪n⟫))`.
pub fn sigma_cov(t: f64, m: Mode) -> f64 {
    let w = (0.75 + nsq(m)).sqrt();
    (-t / 2.0).exp() / br2(m) * ((t * w).cos() + (t * w).sin() / (2.0 * w))
}

pub fn chi(a: f64, b: f64, theta: f64, c0: f64) -> f64 {
    let mut s = 0.0;
    for j in 0..40usize {
        for k in 0..40usize {
            if j as f64 <= theta * k as f64 + c0 {
                s += phi(j, a) * phi(k, b);
            }
        }
    }
    s
}

/// `𝒜^{(2)}_{n,n}(τ)` by its defining sum.
pub fn counterterm(m: Mode, tau: f64, theta: f64, c0: f64, n: usize, shape: Shape) -> f64 {
    let a = nsq(m).sqrt();
    modes(n, shape)
        .into_iter()
        .map(|b| {
            let p = add(m, b);
            let bn = nsq(b).sqrt();
            chi(a, bn, theta, c0) * omega(nsq(p).sqrt(), bn) * d_hat(tau, p) * sigma_cov(tau, b)
        })
        .sum()
}

/// `C_N` from the full Wick contraction of the cubic drift, with no symmetry reduction:
/// `½(∫t³dt)Σ_n⟨n⟩^{-2}·6Σ_{a₁+a₂+a₃=n} f_s(a)²Π⟨aᵢ⟩^{-2}` and `f_s` the average of
/// `V̂₀` over the three pairings.
pub fn c_n(n: usize, beta: f64, shape: Shape, time_factor: f64) -> f64 {
    let ms = modes(n, shape);
    let mut total = 0.0;
    for &m in &ms {
        let mut s = 0.0;
        for &a1 in &ms {
            for &a2 in &ms {
                let a3 = add(m, neg(add(a1, a2)));
                if !inside(a3, n, shape) {
                    continue;
                }
                let f = (v0(add(a1, a2), beta) + v0(add(a1, a3), beta) + v0(add(a2, a3), beta)) / 3.0;
                s += f * f / (br2(a1) * br2(a2) * br2(a3));
            }
        }
        total += 6.0 * s / br2(m);
    }
    0.5 * time_factor * total
}
