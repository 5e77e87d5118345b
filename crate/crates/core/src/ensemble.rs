//! Seeded random band-limited fields for ensembles and initial data.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::spectral::{bracket, Grid, PeriodicField, Spectrum};

/// Random zero-mean spectra supported on `band.0 <= |k| <= band.1`.
///
/// Each mode gets magnitude `10^U(-1,0) · <k>^{-decay}` and a uniform phase;
/// the draw order is ascending `k`, magnitude before phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSpec {
    pub band: (i64, i64),
    pub decay: f64,
}

impl BandSpec {
    pub fn new(k_min: i64, k_max: i64, decay: f64) -> Result<Self> {
        if k_min < 1 || k_max < k_min {
            return Err(Error::InvalidParameter(format!(
                "band [{k_min}, {k_max}] must satisfy 1 <= k_min <= k_max"
            )));
        }
        if !decay.is_finite() {
            return Err(Error::InvalidParameter(format!("decay exponent {decay} is not finite")));
        }
        Ok(Self {
            band: (k_min, k_max),
            decay,
        })
    }

    pub fn sample(&self, grid: &Grid, rng: &mut SplitMix64) -> Result<Spectrum> {
        let (k_min, k_max) = self.band;
        if k_max > grid.max_mode() {
            return Err(Error::ModeOutOfBand {
                mode: k_max,
                max_mode: grid.max_mode(),
            });
        }
        let mut s = Spectrum::zeros(grid);
        for k in k_min..=k_max {
            let magnitude = 10f64.powf(rng.uniform(-1.0, 0.0)) * bracket(k).powf(-self.decay);
            let phase = rng.uniform(0.0, 2.0 * PI);
            let c = Complex64::from_polar(magnitude, phase);
            s.set(k, c)?;
            s.set(-k, c.conj())?;
        }
        Ok(s)
    }

    pub fn sample_field(&self, grid: &Grid, rng: &mut SplitMix64) -> Result<PeriodicField> {
        PeriodicField::from_spectrum(self.sample(grid, rng)?)
    }
}

/// Max and mean of the finite entries of `ratios`; `None` entries (0/0
/// members) are skipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioStats {
    pub max: f64,
    pub mean: f64,
    pub used: usize,
}

impl RatioStats {
    pub fn collect(ratios: impl IntoIterator<Item = Option<f64>>) -> Result<Self> {
        let mut max = 0.0f64;
        let mut sum = 0.0;
        let mut used = 0;
        for r in ratios.into_iter().flatten() {
            max = max.max(r);
            sum += r;
            used += 1;
        }
        if used == 0 {
            return Err(Error::DegenerateEnsemble);
        }
        Ok(Self {
            max,
            mean: sum / used as f64,
            used,
        })
    }
}

/// `numerator / denominator`, or `None` when the denominator vanishes.
pub fn guarded_ratio(numerator: f64, denominator: f64) -> Option<f64> {
    (denominator > 0.0).then(|| numerator / denominator)
}
