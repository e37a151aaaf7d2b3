use rustfft::num_complex::Complex64;

use crate::lattice::{self, Mode, Shape};

pub type C64 = Complex64;

/// Fourier coefficients on a truncated lattice, stored densely on the cube
/// `[-N, N]³`; entries outside the support shape are kept at zero.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField {
    cutoff: usize,
    shape: Shape,
    real: bool,
    data: Vec<C64>,
}

impl FourierField {
    pub fn zeros(cutoff: usize, shape: Shape, real: bool) -> Self {
        let side = 2 * cutoff + 1;
        Self { cutoff, shape, real, data: vec![C64::new(0.0, 0.0); side * side * side] }
    }

    /// Builds a field by evaluating `f` on every supported frequency.
    pub fn from_fn(cutoff: usize, shape: Shape, real: bool, mut f: impl FnMut(Mode) -> C64) -> Self {
        let mut u = Self::zeros(cutoff, shape, real);
        u.fill_with(|n, _| f(n));
        u
    }

    /// Real field with a real, even symbol `f(n)`.
    pub fn from_symbol(cutoff: usize, shape: Shape, mut f: impl FnMut(Mode) -> f64) -> Self {
        Self::from_fn(cutoff, shape, true, |n| C64::new(f(n), 0.0))
    }

    /// The constant field `c`.
    pub fn constant(c: f64, shape: Shape) -> Self {
        let mut u = Self::zeros(0, shape, true);
        u.data[0] = C64::new(c, 0.0);
        u
    }

    #[inline]
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }
    #[inline]
    pub fn shape(&self) -> Shape {
        self.shape
    }
    #[inline]
    pub fn is_real(&self) -> bool {
        self.real
    }
    #[inline]
    pub fn side(&self) -> usize {
        2 * self.cutoff + 1
    }
    pub fn set_real_flag(&mut self, real: bool) {
        self.real = real;
    }

    #[inline]
    pub fn contains(&self, n: Mode) -> bool {
        self.shape.contains(n, self.cutoff)
    }

    #[inline]
    fn slot(&self, n: Mode) -> usize {
        let r = self.cutoff as i32;
        let s = self.side();
        (((n[0] + r) as usize) * s + (n[1] + r) as usize) * s + (n[2] + r) as usize
    }

    /// Dense index of `n`, or `None` outside the support.
    #[inline]
    pub fn index(&self, n: Mode) -> Option<usize> {
        if self.contains(n) {
            Some(self.slot(n))
        } else {
            None
        }
    }

    #[inline]
    pub fn get(&self, n: Mode) -> C64 {
        match self.index(n) {
            Some(i) => self.data[i],
            None => C64::new(0.0, 0.0),
        }
    }

    /// Sets a single coefficient. Panics outside the support.
    #[inline]
    pub fn set(&mut self, n: Mode, v: C64) {
        let i = self.index(n).expect("frequency outside field support");
        self.data[i] = v;
    }

    /// Sets `û(n) = v` and `û(-n) = conj(v)`; at `n = 0` only the real part is kept.
    pub fn set_pair(&mut self, n: Mode, v: C64) {
        if lattice::is_zero(n) {
            self.set(n, C64::new(v.re, 0.0));
        } else {
            self.set(n, v);
            self.set(lattice::neg(n), v.conj());
        }
    }

    pub fn raw(&self) -> &[C64] {
        &self.data
    }

    pub fn raw_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    /// Supported frequencies and coefficients in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (Mode, C64)> + '_ {
        let r = self.cutoff as i32;
        let shape = self.shape;
        let cutoff = self.cutoff;
        (-r..=r)
            .flat_map(move |a| (-r..=r).flat_map(move |b| (-r..=r).map(move |c| [a, b, c])))
            .zip(self.data.iter())
            .filter_map(move |(n, &v)| if shape.contains(n, cutoff) { Some((n, v)) } else { None })
    }

    /// Overwrites every supported coefficient with `f(n, old)`.
    pub fn fill_with(&mut self, mut f: impl FnMut(Mode, C64) -> C64) {
        let r = self.cutoff as i32;
        let s = self.side();
        for a in -r..=r {
            for b in -r..=r {
                let base = (((a + r) as usize) * s + (b + r) as usize) * s;
                for c in -r..=r {
                    let n = [a, b, c];
                    if self.shape.contains(n, self.cutoff) {
                        let i = base + (c + r) as usize;
                        self.data[i] = f(n, self.data[i]);
                    }
                }
            }
        }
    }

    /// Fourier multiplier `û(n) ↦ m(n)û(n)`.
    pub fn multiplier(&self, mut m: impl FnMut(Mode) -> f64) -> Self {
        let mut out = self.clone();
        out.fill_with(|n, v| v * m(n));
        out
    }

    /// Frequency projector onto `shape(N)`; the result has cutoff `N`.
    pub fn project(&self, n_cut: usize) -> Self {
        self.resize(n_cut, self.shape)
    }

    /// Copy onto another support, dropping coefficients that fall outside it.
    pub fn resize(&self, n_cut: usize, shape: Shape) -> Self {
        let mut out = Self::zeros(n_cut, shape, self.real);
        let m = n_cut.min(self.cutoff) as i32;
        for a in -m..=m {
            for b in -m..=m {
                for c in -m..=m {
                    let n = [a, b, c];
                    if shape.contains(n, n_cut) && self.contains(n) {
                        let i = out.slot(n);
                        out.data[i] = self.data[self.slot(n)];
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `self + s·other`, on the larger of the two supports.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        let cut = self.cutoff.max(other.cutoff);
        let shape = if self.cutoff >= other.cutoff { self.shape } else { other.shape };
        let mut out = self.resize(cut, shape);
        out.real = self.real && other.real;
        let r = other.cutoff as i32;
        for a in -r..=r {
            for b in -r..=r {
                for c in -r..=r {
                    let n = [a, b, c];
                    if other.contains(n) && out.contains(n) {
                        let i = out.slot(n);
                        out.data[i] += other.data[other.slot(n)] * s;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-1.0, other)
    }

    /// Adds `c` to the zero mode.
    pub fn add_constant(&mut self, c: f64) {
        let i = self.slot([0, 0, 0]);
        self.data[i] += c;
    }

    pub fn zero_mode(&self) -> C64 {
        self.data[self.slot([0, 0, 0])]
    }

    /// `Σ_n û(n)·conj(v̂(n))`, which equals `∫u v̄ dx` by Parseval.
    pub fn inner(&self, other: &Self) -> C64 {
        let (small, large, flip) = if self.cutoff <= other.cutoff { (self, other, false) } else { (other, self, true) };
        let mut acc = C64::new(0.0, 0.0);
        for (n, v) in small.iter() {
            let w = large.get(n);
            acc += if flip { w * v.conj() } else { v * w.conj() };
        }
        acc
    }

    /// `‖u‖²_{L²} = Σ|û(n)|²`.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `Σ ⟨n⟩^{2s} |û(n)|²`.
    pub fn sobolev_sq(&self, s: f64) -> f64 {
        self.iter().map(|(n, v)| lattice::bracket_sq(n).powf(s) * v.norm_sqr()).sum()
    }

    /// Largest violation of `û(-n) = conj(û(n))`.
    pub fn hermitian_defect(&self) -> f64 {
        self.iter()
            .map(|(n, v)| (v - self.get(lattice::neg(n)).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Replaces coefficients by their Hermitian-symmetric part.
    pub fn symmetrize(&mut self) {
        let copy = self.clone();
        self.fill_with(|n, v| 0.5 * (v + copy.get(lattice::neg(n)).conj()));
        self.real = true;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}
