use num_complex::Complex64;

use super::{bracket, Grid, PeriodicField, Spectrum};
use crate::error::{Error, Result};

/// Symbol `A(k)` of a Fourier multiplier of order `m` on a grid, with a
/// bound `C` such that `<k>^{-m} |A(k)| <= C` on every retained mode.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSymbol {
    grid: Grid,
    order: f64,
    values: Vec<Complex64>,
    bound: f64,
}

impl MultiplierSymbol {
    /// Symbol with the tightest bound for the declared order.
    pub fn new(grid: &Grid, order: f64, f: impl FnMut(i64) -> Complex64) -> Self {
        let values: Vec<Complex64> = grid.modes().map(f).collect();
        let bound = grid
            .modes()
            .zip(&values)
            .map(|(k, a)| bracket(k).powf(-order) * a.norm())
            .fold(0.0, f64::max);
        Self {
            grid: grid.clone(),
            order,
            values,
            bound,
        }
    }

    /// Symbol with a caller-declared bound, checked mode by mode.
    pub fn with_bound(
        grid: &Grid,
        order: f64,
        bound: f64,
        f: impl FnMut(i64) -> Complex64,
    ) -> Result<Self> {
        let mut symbol = Self::new(grid, order, f);
        for (k, a) in grid.modes().zip(&symbol.values) {
            let value = bracket(k).powf(-order) * a.norm();
            if value > bound * (1.0 + 1e-14) {
                return Err(Error::SymbolBound {
                    mode: k,
                    value,
                    bound,
                });
            }
        }
        symbol.bound = bound;
        Ok(symbol)
    }

    pub fn identity(grid: &Grid) -> Self {
        Self::new(grid, 0.0, |_| Complex64::new(1.0, 0.0))
    }

    /// `∂ₓᵖ`, symbol `(ik)^p`, order `p`.
    pub fn derivative(grid: &Grid, p: u32) -> Self {
        let unit = Complex64::new(0.0, 1.0).powu(p);
        Self::new(grid, p as f64, |k| unit * (k as f64).powi(p as i32))
    }

    /// `<∂ₓ>^r`, symbol `<k>^r`, order `r`, bound 1.
    pub fn bracket_power(grid: &Grid, r: f64) -> Self {
        Self::new(grid, r, |k| Complex64::new(bracket(k).powf(r), 0.0))
    }

    /// Hilbert transform, symbol `-i sgn k`, order 0, bound 1.
    pub fn hilbert(grid: &Grid) -> Self {
        Self::new(grid, 0.0, |k| Complex64::new(0.0, -(k.signum() as f64)))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn value(&self, k: i64) -> Complex64 {
        self.values[(k + self.grid.max_mode()) as usize]
    }

    /// `AB`: symbol `A(k)B(k)`, order the sum of orders.
    pub fn compose(&self, other: &MultiplierSymbol) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let values: Vec<Complex64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        let order = self.order + other.order;
        let mut composed = Self::new(&self.grid, order, |k| {
            values[(k + self.grid.max_mode()) as usize]
        });
        composed.bound = composed.bound.min(self.bound * other.bound);
        Ok(composed)
    }

    pub fn apply(&self, spectrum: &Spectrum) -> Result<Spectrum> {
        self.grid.ensure_same(spectrum.grid())?;
        Ok(spectrum.map_modes(|k| self.value(k)))
    }
}

/// `Af` with `(Af)^(k) = A(k) f̂(k)`.
pub fn apply_multiplier(symbol: &MultiplierSymbol, field: &PeriodicField) -> Result<PeriodicField> {
    PeriodicField::from_spectrum(symbol.apply(field.spectrum())?)
}
