//! Cubic 3-D FFTs assembled from 1-D `rustfft` plans.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::field::C64;
use crate::error::{Error, Result};

static GRID_POINT_CAP: AtomicUsize = AtomicUsize::new(1 << 27);

/// Sets the largest grid (in points) any product may allocate.
pub fn set_grid_point_cap(points: usize) {
    GRID_POINT_CAP.store(points, Ordering::Relaxed);
}

pub fn grid_point_cap() -> usize {
    GRID_POINT_CAP.load(Ordering::Relaxed)
}

/// Smallest even `2^a 3^b 5^c` that is at least `min`.
pub fn fast_side(min: usize) -> usize {
    let mut l = min.max(2);
    loop {
        if l % 2 == 0 {
            let mut m = l;
            for p in [2, 3, 5] {
                while m % p == 0 {
                    m /= p;
                }
            }
            if m == 1 {
                return l;
            }
        }
        l += 1;
    }
}

pub(crate) fn check_cap(side: usize) -> Result<()> {
    let points = side * side * side;
    let cap = grid_point_cap();
    if points > cap {
        return Err(Error::GridTooLarge { side, points, cap });
    }
    Ok(())
}

pub struct Fft3 {
    side: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: Vec<C64>,
    lines: Vec<C64>,
}

impl Fft3 {
    pub fn new(side: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(side);
        let inv = planner.plan_fft_inverse(side);
        let len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
        Self {
            side,
            fwd,
            inv,
            scratch: vec![C64::new(0.0, 0.0); len],
            lines: vec![C64::new(0.0, 0.0); side * side],
        }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Unnormalized `Σ_x f(x) e^{-i k·x}`.
    pub fn forward(&mut self, buf: &mut [C64]) {
        let f = self.fwd.clone();
        self.run(buf, &*f);
    }

    /// Unnormalized `Σ_k f̂(k) e^{i k·x}`.
    pub fn inverse(&mut self, buf: &mut [C64]) {
        let f = self.inv.clone();
        self.run(buf, &*f);
    }

    fn run(&mut self, buf: &mut [C64], f: &dyn Fft<f64>) {
        let l = self.side;
        assert_eq!(buf.len(), l * l * l);
        let scratch = &mut self.scratch;
        let lines = &mut self.lines;
        f.process_with_scratch(buf, scratch);
        for a in 0..l {
            let plane = &mut buf[a * l * l..(a + 1) * l * l];
            for j in 0..l {
                for k in 0..l {
                    lines[k * l + j] = plane[j * l + k];
                }
            }
            f.process_with_scratch(lines, scratch);
            for j in 0..l {
                for k in 0..l {
                    plane[j * l + k] = lines[k * l + j];
                }
            }
        }
        for b in 0..l {
            for a in 0..l {
                let row = (a * l + b) * l;
                for k in 0..l {
                    lines[k * l + a] = buf[row + k];
                }
            }
            f.process_with_scratch(lines, scratch);
            for a in 0..l {
                let row = (a * l + b) * l;
                for k in 0..l {
                    buf[row + k] = lines[k * l + a];
                }
            }
        }
    }
}

thread_local! {
    static PLANS: RefCell<HashMap<usize, Fft3>> = RefCell::new(HashMap::new());
    static POOL: RefCell<Vec<Vec<C64>>> = const { RefCell::new(Vec::new()) };
}

/// Zeroed complex buffer, reused from a per-thread pool when possible.
pub(crate) fn take_buffer(len: usize) -> Vec<C64> {
    let mut v = POOL.with(|p| p.borrow_mut().pop()).unwrap_or_default();
    v.clear();
    v.resize(len, C64::new(0.0, 0.0));
    v
}

pub(crate) fn recycle_buffer(v: Vec<C64>) {
    POOL.with(|p| {
        let mut p = p.borrow_mut();
        if p.len() < 8 {
            p.push(v);
        }
    });
}

/// Runs `f` with a cached per-thread plan for the given side.
pub fn with_fft<R>(side: usize, f: impl FnOnce(&mut Fft3) -> R) -> R {
    let mut plan = PLANS
        .with(|p| p.borrow_mut().remove(&side))
        .unwrap_or_else(|| Fft3::new(side));
    let out = f(&mut plan);
    PLANS.with(|p| {
        p.borrow_mut().insert(side, plan);
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_sides() {
        assert_eq!(fast_side(17), 18);
        assert_eq!(fast_side(130), 144);
        assert_eq!(fast_side(258), 270);
        assert_eq!(fast_side(1), 2);
    }

    #[test]
    fn roundtrip_and_single_mode() {
        let l = 6;
        let mut buf = vec![C64::new(0.0, 0.0); l * l * l];
        // mode k = (1, 2, -1) placed at its wrapped position
        let idx = |a: usize, b: usize, c: usize| (a * l + b) * l + c;
        buf[idx(1, 2, l - 1)] = C64::new(1.0, 0.0);
        let orig = buf.clone();
        with_fft(l, |f| f.inverse(&mut buf));
        let x = [0usize, 1, 3];
        let phase = 2.0 * std::f64::consts::PI / l as f64 * (x[0] as f64 + 2.0 * x[1] as f64 - x[2] as f64);
        let got = buf[idx(x[0], x[1], x[2])];
        assert!((got - C64::new(phase.cos(), phase.sin())).norm() < 1e-12);
        with_fft(l, |f| f.forward(&mut buf));
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a / (l * l * l) as f64 - b).norm() < 1e-12);
        }
    }
}
