//! Truncated Fourier lattice, dealiased products and Littlewood–Paley tools.

pub mod fft;
pub mod field;
pub mod grid;
pub mod lp;
pub mod snapshot;

pub use field::{FourierField, C64};
pub use grid::{from_grid, multiply, multiply_to, square, square_pair, to_grid, GridField, ProductGrid};
pub use lp::{besov_norm, lp_block, paraproducts, resonant_product};
pub use snapshot::{read_snapshot, write_snapshot};

/// `π_N u`.
pub fn project(u: &FourierField, n: usize) -> FourierField {
    u.project(n)
}
