use std::f64::consts::PI;

use num_complex::Complex64;

use super::{bracket, Grid};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Fourier coefficients `f̂(k) = (1/2π) ∫ f e^{-ikx} dx` over the retained
/// modes `|k| <= K` of a grid, stored densely as `coeffs[k + K]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![ZERO; grid.mode_count()],
        }
    }

    pub fn from_fn(grid: &Grid, mut f: impl FnMut(i64) -> Complex64) -> Self {
        let coeffs = grid.modes().map(&mut f).collect();
        Self {
            grid: grid.clone(),
            coeffs,
        }
    }

    /// Takes ownership of coefficients indexed `k + K`.
    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.mode_count() {
            return Err(Error::InvalidParameter(format!(
                "expected {} coefficients for a {}-point grid, got {}",
                grid.mode_count(),
                grid.n_points(),
                coeffs.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Real trigonometric polynomial `Σ a_j cos(k_j x + θ_j)`.
    pub fn from_cosines(grid: &Grid, terms: &[(f64, i64, f64)]) -> Result<Self> {
        let mut s = Self::zeros(grid);
        for &(amplitude, k, phase) in terms {
            if k == 0 {
                s.add_at(0, Complex64::new(amplitude * phase.cos(), 0.0))?;
                continue;
            }
            let c = Complex64::from_polar(0.5 * amplitude, phase);
            s.add_at(k, c)?;
            s.add_at(-k, c.conj())?;
        }
        Ok(s)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn max_mode(&self) -> i64 {
        self.grid.max_mode()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at mode `k`; zero outside the retained band.
    pub fn get(&self, k: i64) -> Complex64 {
        let k_max = self.max_mode();
        if k.abs() > k_max {
            ZERO
        } else {
            self.coeffs[(k + k_max) as usize]
        }
    }

    pub fn set(&mut self, k: i64, value: Complex64) -> Result<()> {
        let i = self.index(k)?;
        self.coeffs[i] = value;
        Ok(())
    }

    fn add_at(&mut self, k: i64, value: Complex64) -> Result<()> {
        let i = self.index(k)?;
        self.coeffs[i] += value;
        Ok(())
    }

    fn index(&self, k: i64) -> Result<usize> {
        let k_max = self.max_mode();
        if k.abs() > k_max {
            return Err(Error::ModeOutOfBand {
                mode: k,
                max_mode: k_max,
            });
        }
        Ok((k + k_max) as usize)
    }

    /// `(k, f̂(k))` in ascending `k`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let k_max = self.max_mode();
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - k_max, c))
    }

    pub fn mean(&self) -> f64 {
        self.get(0).re
    }

    /// Largest `|f̂(-k) - conj(f̂(k))|` and the mode where it occurs.
    pub fn hermitian_defect(&self) -> (i64, f64) {
        (0..=self.max_mode())
            .map(|k| (k, (self.get(-k) - self.get(k).conj()).norm()))
            .fold((0, 0.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc })
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn l1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == ZERO)
    }

    /// `(2π Σ <k>^{2s} |f̂(k)|²)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        let sum: f64 = self
            .iter()
            .map(|(k, c)| bracket(k).powf(2.0 * s) * c.norm_sqr())
            .sum();
        (2.0 * PI * sum).sqrt()
    }

    /// Real `L²` inner product `2π Σ f̂(k) conj(ĝ(k))`.
    pub fn inner(&self, other: &Spectrum) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        let sum: Complex64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(2.0 * PI * sum.re)
    }

    /// Diagonal action `f̂(k) -> A(k) f̂(k)`.
    pub fn map_modes(&self, mut symbol: impl FnMut(i64) -> Complex64) -> Spectrum {
        let coeffs = self.iter().map(|(k, c)| symbol(k) * c).collect();
        Spectrum {
            grid: self.grid.clone(),
            coeffs,
        }
    }

    /// `∂ₓᵖ`.
    pub fn derivative(&self, p: u32) -> Spectrum {
        let i_pow = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ][(p % 4) as usize];
        self.map_modes(|k| i_pow * (k as f64).powi(p as i32))
    }

    /// Discrete Hilbert transform, symbol `-i sgn k` with `sgn 0 = 0`.
    pub fn hilbert(&self) -> Spectrum {
        self.map_modes(|k| Complex64::new(0.0, -(k.signum() as f64)))
    }

    /// `<∂ₓ>^r`, symbol `(1 + k²)^{r/2}`.
    pub fn bracket_power(&self, r: f64) -> Spectrum {
        self.map_modes(|k| Complex64::new(bracket(k).powf(r), 0.0))
    }

    /// Zero every mode with `|k| > band`.
    pub fn truncated(&self, band: i64) -> Spectrum {
        self.map_modes(|k| {
            if k.abs() <= band {
                Complex64::new(1.0, 0.0)
            } else {
                ZERO
            }
        })
    }

    pub fn without_mean(&self) -> Spectrum {
        let mut out = self.clone();
        out.coeffs[self.max_mode() as usize] = ZERO;
        out
    }

    pub fn scaled(&self, a: f64) -> Spectrum {
        Spectrum {
            grid: self.grid.clone(),
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &Spectrum) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * a;
        }
        Ok(())
    }

    pub fn plus(&self, other: &Spectrum) -> Result<Spectrum> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn minus(&self, other: &Spectrum) -> Result<Spectrum> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// `max_k |self(k) - other(k)|`.
    pub fn max_deviation(&self, other: &Spectrum) -> Result<f64> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Samples at the grid nodes, imaginary parts dropped without checks.
    pub(crate) fn real_samples(&self) -> Vec<f64> {
        self.grid
            .evaluate_on(&self.coeffs, self.grid.n_points())
            .into_iter()
            .map(|z| z.re)
            .collect()
    }

    pub(crate) fn samples_on(&self, len: usize) -> Vec<Complex64> {
        self.grid.evaluate_on(&self.coeffs, len)
    }
}
