use rayon::prelude::*;

/// `f(0), …, f(n-1)` evaluated on the worker pool, returned in index order.
pub fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

/// Sizes the global worker pool; only the first call has an effect.
pub fn init_pool(threads: usize) -> bool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().is_ok()
}
