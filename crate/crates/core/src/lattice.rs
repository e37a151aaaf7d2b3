//! Integer frequency lattice on the 3-torus.

use serde::{Deserialize, Serialize};

/// A lattice frequency `n ∈ ℤ³`.
pub type Mode = [i32; 3];

#[inline]
pub fn norm_sq(n: Mode) -> i64 {
    let [a, b, c] = n;
    (a as i64) * (a as i64) + (b as i64) * (b as i64) + (c as i64) * (c as i64)
}

#[inline]
pub fn norm(n: Mode) -> f64 {
    (norm_sq(n) as f64).sqrt()
}

/// `⟨n⟩² = 1 + |n|²`.
#[inline]
pub fn bracket_sq(n: Mode) -> f64 {
    1.0 + norm_sq(n) as f64
}

/// `⟨n⟩ = (1 + |n|²)^{1/2}`.
#[inline]
pub fn bracket(n: Mode) -> f64 {
    bracket_sq(n).sqrt()
}

/// Damped-wave frequency `⟪n⟫ = (3/4 + |n|²)^{1/2}`.
#[inline]
pub fn wave_bracket(n: Mode) -> f64 {
    (0.75 + norm_sq(n) as f64).sqrt()
}

#[inline]
pub fn neg(n: Mode) -> Mode {
    [-n[0], -n[1], -n[2]]
}

#[inline]
pub fn add(a: Mode, b: Mode) -> Mode {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: Mode, b: Mode) -> Mode {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn is_zero(n: Mode) -> bool {
    n == [0, 0, 0]
}

/// Membership in the half lattice Λ₀: `0` together with the strictly
/// lexicographically positive frequencies. Every nonzero `n` has exactly one
/// of `n`, `-n` in Λ₀.
#[inline]
pub fn in_half_lattice(n: Mode) -> bool {
    if n[0] != 0 {
        return n[0] > 0;
    }
    if n[1] != 0 {
        return n[1] > 0;
    }
    n[2] >= 0
}

/// Support shape of the frequency projector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    #[default]
    Ball,
    Cube,
}

impl Shape {
    #[inline]
    pub fn contains(self, n: Mode, cutoff: usize) -> bool {
        let r = cutoff as i64;
        match self {
            Shape::Ball => norm_sq(n) <= r * r,
            Shape::Cube => n.iter().all(|&c| (c as i64).abs() <= r),
        }
    }
}

/// All frequencies of the support `{n : n ∈ shape(cutoff)}` in lexicographic order.
pub fn modes(cutoff: usize, shape: Shape) -> Vec<Mode> {
    let r = cutoff as i32;
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                let n = [a, b, c];
                if shape.contains(n, cutoff) {
                    out.push(n);
                }
            }
        }
    }
    out
}

/// Frequencies of the support that lie in Λ₀.
pub fn half_modes(cutoff: usize, shape: Shape) -> Vec<Mode> {
    modes(cutoff, shape).into_iter().filter(|&n| in_half_lattice(n)).collect()
}

/// Injective 64-bit key of a frequency with `|n_i| < 2^19`, used as an RNG stream id.
#[inline]
pub fn mode_key(n: Mode) -> u64 {
    const OFF: i64 = 1 << 19;
    let f = |c: i32| ((c as i64 + OFF) as u64) & 0xF_FFFF;
    (f(n[0]) << 40) | (f(n[1]) << 20) | f(n[2])
}

/// Distinct values of `|n|²` over the support, ascending.
pub fn shells(cutoff: usize, shape: Shape) -> Vec<i64> {
    let mut s: Vec<i64> = modes(cutoff, shape).into_iter().map(norm_sq).collect();
    s.sort_unstable();
    s.dedup();
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_counts() {
        assert_eq!(modes(0, Shape::Ball).len(), 1);
        assert_eq!(modes(1, Shape::Ball).len(), 7);
        assert_eq!(modes(2, Shape::Ball).len(), 33);
        assert_eq!(modes(1, Shape::Cube).len(), 27);
    }

    #[test]
    fn half_lattice_splits_pairs() {
        for n in modes(3, Shape::Ball) {
            if is_zero(n) {
                assert!(in_half_lattice(n));
            } else {
                assert_ne!(in_half_lattice(n), in_half_lattice(neg(n)));
            }
        }
    }

    #[test]
    fn keys_are_distinct() {
        let ms = modes(4, Shape::Cube);
        let mut keys: Vec<u64> = ms.iter().map(|&n| mode_key(n)).collect();
        keys.sort_unstable();
        keys.dedup();
        assert_eq!(keys.len(), ms.len());
    }
}
