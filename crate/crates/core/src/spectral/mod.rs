//! Periodic fields on a uniform grid, their Fourier coefficients, and
//! Fourier-multiplier operators.

mod field;
mod grid;
mod product;
mod snapshot;
mod spectrum;
mod symbol;

pub use field::{
    analyze, dealias, enforce_zero_mean, mean, parseval_pair, sobolev_norm, synthesize,
    PeriodicField, RESIDUE_TOLERANCE, SYMMETRY_TOLERANCE,
};
pub use grid::Grid;
pub use product::{band_product, product, ProductRule};
pub use snapshot::{format_snapshot, parse_snapshot, read_snapshot, write_snapshot};
pub use spectrum::Spectrum;
pub use symbol::{apply_multiplier, MultiplierSymbol};

/// Japanese bracket `<k> = (1 + k²)^{1/2}`.
pub fn bracket(k: i64) -> f64 {
    let k = k as f64;
    (1.0 + k * k).sqrt()
}
