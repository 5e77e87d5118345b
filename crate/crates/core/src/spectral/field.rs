use std::f64::consts::PI;

use super::{Grid, Spectrum};
use crate::error::{Error, Result};

/// Hermitian defect (relative to the largest coefficient) tolerated by
/// [`synthesize`].
pub const SYMMETRY_TOLERANCE: f64 = 1e-10;

/// Imaginary residue (relative to `Σ|f̂|`) silently discarded by [`synthesize`].
pub const RESIDUE_TOLERANCE: f64 = 1e-12;

/// Real periodic function sampled at `x_j = 2πj/n`, with its spectrum cached.
///
/// The two representations are kept consistent: constructing from samples
/// projects onto the retained modes (Nyquist content is discarded).
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicField {
    samples: Vec<f64>,
    spectrum: Spectrum,
}

impl PeriodicField {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            samples: vec![0.0; grid.n_points()],
            spectrum: Spectrum::zeros(grid),
        }
    }

    pub fn from_samples(grid: &Grid, samples: &[f64]) -> Result<Self> {
        let spectrum = analyze(grid, samples)?;
        let samples = spectrum.real_samples();
        Ok(Self { samples, spectrum })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples: Vec<f64> = grid.nodes().map(f).collect();
        Self::from_samples(grid, &samples)
    }

    pub fn from_spectrum(spectrum: Spectrum) -> Result<Self> {
        synthesize(&spectrum)
    }

    /// Synthesis without the symmetry and residue checks.
    pub(crate) fn from_spectrum_unchecked(spectrum: Spectrum) -> Self {
        let samples = spectrum.real_samples();
        Self { samples, spectrum }
    }

    pub fn grid(&self) -> &Grid {
        self.spectrum.grid()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn into_spectrum(self) -> Spectrum {
        self.spectrum
    }

    pub fn mean(&self) -> f64 {
        self.spectrum.mean()
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.spectrum.sobolev_norm(s)
    }

    /// Trapezoid `∫ f²`, exact for the retained band.
    pub fn l2_norm_quadrature(&self) -> f64 {
        (self.grid().spacing() * self.samples.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    /// Trapezoid `∫ f g`.
    pub fn inner_quadrature(&self, other: &PeriodicField) -> Result<f64> {
        self.grid().ensure_same(other.grid())?;
        Ok(self.grid().spacing()
            * self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(a, b)| a * b)
                .sum::<f64>())
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Smallest sample and its grid index.
    pub fn min_with_index(&self) -> (usize, f64) {
        self.samples
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (j, v)| if v < acc.1 { (j, v) } else { acc })
    }
}

/// Fourier coefficients of real samples on `grid`.
///
/// Uses the `1/(2π)` normalization so that `f̂(0)` is the mean and
/// `‖f‖²_{L²} = 2π Σ|f̂(k)|²`.
pub fn analyze(grid: &Grid, samples: &[f64]) -> Result<Spectrum> {
    if samples.len() != grid.n_points() {
        return Err(Error::InvalidParameter(format!(
            "expected {} samples, got {}",
            grid.n_points(),
            samples.len()
        )));
    }
    if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Spectrum::from_coeffs(grid, grid.coefficients_from(samples))
}

pub fn synthesize(spectrum: &Spectrum) -> Result<PeriodicField> {
    let scale = spectrum.max_abs();
    let (mode, defect) = spectrum.hermitian_defect();
    if defect > SYMMETRY_TOLERANCE * scale {
        return Err(Error::InconsistentSpectrum { mode, defect });
    }
    let values = spectrum.samples_on(spectrum.grid().n_points());
    let residue = values.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if residue > RESIDUE_TOLERANCE * spectrum.l1().max(f64::MIN_POSITIVE) {
        return Err(Error::ImaginaryResidue { residue });
    }
    Ok(PeriodicField {
        samples: values.into_iter().map(|z| z.re).collect(),
        spectrum: spectrum.clone(),
    })
}

pub fn mean(field: &PeriodicField) -> f64 {
    field.mean()
}

/// Zeroes `f̂(0)` and nothing else.
pub fn enforce_zero_mean(field: &PeriodicField) -> PeriodicField {
    let spectrum = field.spectrum.without_mean();
    let samples = spectrum.real_samples();
    PeriodicField { samples, spectrum }
}

pub fn sobolev_norm(field: &PeriodicField, s: f64) -> f64 {
    field.sobolev_norm(s)
}

/// Zero every mode with `|k| > fraction·K`.
///
/// # Panics
/// If `fraction` is not in `(0, 1]`.
pub fn dealias(spectrum: &Spectrum, fraction: f64) -> Spectrum {
    assert!(
        fraction > 0.0 && fraction <= 1.0,
        "dealias fraction must lie in (0, 1], got {fraction}"
    );
    spectrum.truncated(spectrum.grid().band_for_fraction(fraction))
}

/// `‖f‖²_{L²}` from the quadrature and from Parseval, returned as a pair.
pub fn parseval_pair(field: &PeriodicField) -> (f64, f64) {
    let quad = field.l2_norm_quadrature().powi(2);
    let spec = 2.0 * PI * field.spectrum().coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>();
    (quad, spec)
}
