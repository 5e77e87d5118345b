use super::Spectrum;
use crate::error::{Error, Result};

/// How a pointwise product of two fields is projected back onto the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ProductRule {
    /// Multiply samples on the native grid; high-mode content wraps around.
    Aliased,
    /// Truncate both factors to the 2/3 band, multiply, truncate the result.
    /// Exact on the retained band.
    #[default]
    TwoThirds,
    /// Exact product of the full retained band, truncated to `|k| <= K`.
    Padded,
    /// Like `TwoThirds` with an explicit band `|k| <= B`.
    Band(i64),
}

impl ProductRule {
    /// Rule keeping `|k| <= fraction·K`; the full band is computed exactly.
    pub fn for_fraction(grid: &super::Grid, fraction: f64) -> Self {
        let band = grid.band_for_fraction(fraction);
        if band >= grid.max_mode() {
            ProductRule::Padded
        } else {
            ProductRule::Band(band)
        }
    }

    /// Highest mode the rule can return nonzero.
    pub fn output_band(&self, grid: &super::Grid) -> i64 {
        match *self {
            ProductRule::Aliased | ProductRule::Padded => grid.max_mode(),
            ProductRule::TwoThirds => grid.two_thirds_band(),
            ProductRule::Band(b) => b,
        }
    }
}

/// Spectrum of the pointwise product `a·b` under `rule`.
pub fn product(a: &Spectrum, b: &Spectrum, rule: ProductRule) -> Result<Spectrum> {
    let grid = a.grid();
    grid.ensure_same(b.grid())?;
    match rule {
        ProductRule::Aliased => Ok(on_grid(a, b, grid.n_points())),
        ProductRule::Padded => Ok(on_grid(a, b, grid.padded_len())),
        ProductRule::TwoThirds => band_product(a, b, grid.two_thirds_band()),
        ProductRule::Band(band) => band_product(a, b, band),
    }
}

/// Exact product of the `|k| <= band` parts of `a` and `b`, restricted to
/// `|k| <= band`.
pub fn band_product(a: &Spectrum, b: &Spectrum, band: i64) -> Result<Spectrum> {
    let grid = a.grid();
    grid.ensure_same(b.grid())?;
    if band < 0 || band > grid.max_mode() {
        return Err(Error::InvalidParameter(format!(
            "product band {band} outside 0..={}",
            grid.max_mode()
        )));
    }
    // Modes up to 2B wrap to |k - n| >= n - 2B, which stays above B when 3B < n.
    let len = if 3 * band < grid.n_points() as i64 {
        grid.n_points()
    } else {
        grid.padded_len()
    };
    let a = a.truncated(band);
    let b = b.truncated(band);
    Ok(on_grid(&a, &b, len).truncated(band))
}

fn on_grid(a: &Spectrum, b: &Spectrum, len: usize) -> Spectrum {
    let grid = a.grid();
    let va = a.samples_on(len);
    let vb = b.samples_on(len);
    let w: Vec<f64> = va.iter().zip(&vb).map(|(x, y)| x.re * y.re).collect();
    Spectrum::from_coeffs(grid, grid.coefficients_from(&w)).expect("coefficient count matches grid")
}
