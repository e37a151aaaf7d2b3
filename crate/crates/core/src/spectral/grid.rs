//! Bridge between truncated Fourier fields and uniform physical grids.
//!
//! Real fields are packed two at a time into one complex transform. Products
//! are exact (alias free) whenever the grid side satisfies [`product_side`].

use super::fft::{check_cap, fast_side, recycle_buffer, take_buffer, with_fft};
use super::field::{FourierField, C64};
use crate::error::{Error, Result};
use crate::lattice::{Mode, Shape};

/// Real samples on the uniform `side³` grid `x_j = 2πj/side`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    side: usize,
    values: Vec<f64>,
}

impl GridField {
    pub fn zeros(side: usize) -> Self {
        Self { side, values: vec![0.0; side * side * side] }
    }
    pub fn from_values(side: usize, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), side * side * side);
        Self { side, values }
    }
    pub fn side(&self) -> usize {
        self.side
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    /// Mean of `|f|^p` raised to `1/p`; `p = ∞` gives the sup norm.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values.iter().fold(0.0, |m, v| m.max(v.abs()));
        }
        let n = self.values.len() as f64;
        (self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() / n).powf(1.0 / p)
    }
    /// `∫ f dx` with the normalized measure.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
    pub fn value_at(&self, j: [usize; 3]) -> f64 {
        let l = self.side;
        self.values[(j[0] * l + j[1]) * l + j[2]]
    }
}

/// Grid side for which the product of fields with cutoffs `a` and `b` is exact
/// on all output frequencies up to `out`.
pub fn product_side(a: usize, b: usize, out: usize) -> usize {
    let need = (a + b + out + 1).max(2 * a.max(b) + 1).max(2 * out + 1);
    fast_side(need)
}

#[inline]
fn wrap(c: i32, l: usize) -> usize {
    if c < 0 {
        (c + l as i32) as usize
    } else {
        c as usize
    }
}

#[inline]
fn grid_index(n: Mode, l: usize) -> usize {
    (wrap(n[0], l) * l + wrap(n[1], l)) * l + wrap(n[2], l)
}

fn place(u: &FourierField, buf: &mut [C64], l: usize, factor: C64) {
    for (n, v) in u.iter() {
        if v.re != 0.0 || v.im != 0.0 {
            buf[grid_index(n, l)] += v * factor;
        }
    }
}

fn require_fit(u: &FourierField, l: usize) -> Result<()> {
    if 2 * u.cutoff() + 1 > l {
        return Err(Error::Config(format!("grid side {l} too small for cutoff {}", u.cutoff())));
    }
    Ok(())
}

/// Physical samples of a real field.
pub fn to_grid(u: &FourierField, side: usize) -> Result<GridField> {
    let zero = FourierField::zeros(0, u.shape(), true);
    Ok(to_grid_pair(u, &zero, side)?.0)
}

/// Physical samples of two real fields from one complex transform.
pub fn to_grid_pair(u: &FourierField, v: &FourierField, side: usize) -> Result<(GridField, GridField)> {
    require_fit(u, side)?;
    require_fit(v, side)?;
    check_cap(side)?;
    let l = side;
    let mut buf = take_buffer(l * l * l);
    place(u, &mut buf, l, C64::new(1.0, 0.0));
    place(v, &mut buf, l, C64::new(0.0, 1.0));
    with_fft(l, |f| f.inverse(&mut buf));
    let a = buf.iter().map(|z| z.re).collect();
    let b = buf.iter().map(|z| z.im).collect();
    recycle_buffer(buf);
    Ok((GridField { side: l, values: a }, GridField { side: l, values: b }))
}

fn extract_pair(buf: &[C64], l: usize, cutoff: usize, shape: Shape) -> (FourierField, FourierField) {
    let norm = 1.0 / (l * l * l) as f64;
    let mut a = FourierField::zeros(cutoff, shape, true);
    let mut b = FourierField::zeros(cutoff, shape, true);
    let mut pairs = Vec::with_capacity(a.raw().len());
    a.fill_with(|n, _| {
        let c = buf[grid_index(n, l)];
        let d = buf[grid_index(crate::lattice::neg(n), l)].conj();
        pairs.push((c - d) * C64::new(0.0, -0.5) * norm);
        0.5 * (c + d) * norm
    });
    let mut it = pairs.into_iter();
    b.fill_with(|_, _| it.next().unwrap_or_default());
    (a, b)
}

/// Fourier coefficients (restricted to `shape(cutoff)`) of a real grid function.
pub fn from_grid(g: &GridField, cutoff: usize, shape: Shape) -> FourierField {
    let zero = GridField::zeros(g.side);
    from_grid_pair(g, &zero, cutoff, shape).0
}

/// Fourier coefficients of two real grid functions from one complex transform.
pub fn from_grid_pair(a: &GridField, b: &GridField, cutoff: usize, shape: Shape) -> (FourierField, FourierField) {
    assert_eq!(a.side, b.side);
    let l = a.side;
    let mut buf = take_buffer(l * l * l);
    for (z, (&x, &y)) in buf.iter_mut().zip(a.values.iter().zip(&b.values)) {
        *z = C64::new(x, y);
    }
    with_fft(l, |f| f.forward(&mut buf));
    let out = extract_pair(&buf, l, cutoff.min((l - 1) / 2), shape);
    recycle_buffer(buf);
    out
}

/// Accumulates `Σ_i a_i(x) b_i(x)` on a grid, one inverse transform per pair.
pub struct ProductGrid {
    side: usize,
    acc: Vec<f64>,
    buf: Vec<C64>,
}

impl ProductGrid {
    pub fn new(side: usize) -> Result<Self> {
        check_cap(side)?;
        let n = side * side * side;
        Ok(Self { side, acc: vec![0.0; n], buf: take_buffer(n) })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Adds `s·a(x)·b(x)`.
    pub fn add_product(&mut self, a: &FourierField, b: &FourierField, s: f64) -> Result<()> {
        require_fit(a, self.side)?;
        require_fit(b, self.side)?;
        let l = self.side;
        self.buf.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        place(a, &mut self.buf, l, C64::new(1.0, 0.0));
        place(b, &mut self.buf, l, C64::new(0.0, 1.0));
        let buf = &mut self.buf;
        with_fft(l, |f| f.inverse(buf));
        for (acc, z) in self.acc.iter_mut().zip(self.buf.iter()) {
            *acc += s * z.re * z.im;
        }
        Ok(())
    }

    /// Adds `s·g(x)` for a grid function on the same grid.
    pub fn add_grid(&mut self, g: &GridField, s: f64) {
        assert_eq!(g.side, self.side);
        for (acc, v) in self.acc.iter_mut().zip(&g.values) {
            *acc += s * v;
        }
    }

    pub fn into_grid(mut self) -> GridField {
        GridField { side: self.side, values: std::mem::take(&mut self.acc) }
    }

    pub fn finish(self, cutoff: usize, shape: Shape) -> FourierField {
        from_grid(&self.into_grid(), cutoff, shape)
    }
}

impl Drop for ProductGrid {
    fn drop(&mut self) {
        recycle_buffer(std::mem::take(&mut self.buf));
    }
}

/// Finishes two accumulators with a single forward transform.
pub fn finish_pair(a: ProductGrid, b: ProductGrid, cutoff: usize, shape: Shape) -> (FourierField, FourierField) {
    from_grid_pair(&a.into_grid(), &b.into_grid(), cutoff, shape)
}

/// Exact product of two real fields; the result has cutoff `N_u + N_v`.
pub fn multiply(u: &FourierField, v: &FourierField) -> Result<FourierField> {
    let out = u.cutoff() + v.cutoff();
    let shape = u.shape();
    multiply_to(u, v, out, shape)
}

/// Exact product restricted to `shape(out)`; uses the smallest alias-free grid.
pub fn multiply_to(u: &FourierField, v: &FourierField, out: usize, shape: Shape) -> Result<FourierField> {
    let side = product_side(u.cutoff(), v.cutoff(), out);
    let mut g = ProductGrid::new(side)?;
    g.add_product(u, v, 1.0)?;
    Ok(g.finish(out, shape))
}

/// Exact squares of two real fields using one inverse and one forward transform.
pub fn square_pair(u: &FourierField, v: &FourierField) -> Result<(FourierField, FourierField)> {
    let cu = u.cutoff();
    let cv = v.cutoff();
    let side = product_side(cu.max(cv), cu.max(cv), 2 * cu.max(cv));
    let (a, b) = to_grid_pair(u, v, side)?;
    let a2 = GridField { side, values: a.values.iter().map(|x| x * x).collect() };
    let b2 = GridField { side, values: b.values.iter().map(|x| x * x).collect() };
    let (mut su, mut sv) = from_grid_pair(&a2, &b2, 2 * cu.max(cv), u.shape());
    if cu < cv {
        su = su.project(2 * cu);
    }
    if cv < cu {
        sv = sv.resize(2 * cv, v.shape());
    }
    Ok((su, sv))
}

/// Exact square of a real field.
pub fn square(u: &FourierField) -> Result<FourierField> {
    let zero = FourierField::zeros(0, u.shape(), true);
    Ok(square_pair(u, &zero)?.0.project(2 * u.cutoff()))
}
