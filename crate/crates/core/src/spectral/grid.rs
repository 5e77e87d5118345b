use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    padded_forward: Arc<dyn Fft<f64>>,
    padded_inverse: Arc<dyn Fft<f64>>,
}

/// Uniform grid on the torus `[0, 2π)` with `n_points` nodes.
///
/// Retained Fourier modes are `|k| <= K = n_points/2 - 1`; the Nyquist mode is
/// never represented so every retained mode has its Hermitian partner. Plans
/// are shared behind an `Arc` and are safe to use from several threads.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    plans: Arc<Plans>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("n_points", &self.n).finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl Eq for Grid {}

impl Grid {
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points < 8 || !n_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(n_points));
        }
        let padded = Self::padded_len_for(n_points);
        let mut planner = FftPlanner::new();
        let plans = Plans {
            forward: planner.plan_fft_forward(n_points),
            inverse: planner.plan_fft_inverse(n_points),
            padded_forward: planner.plan_fft_forward(padded),
            padded_inverse: planner.plan_fft_inverse(padded),
        };
        Ok(Self {
            n: n_points,
            plans: Arc::new(plans),
        })
    }

    fn padded_len_for(n: usize) -> usize {
        // 3n/2 = 3K + 3 > 3K: products of retained modes never alias back
        // onto the retained band.
        3 * n / 2
    }

    pub fn n_points(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// Highest retained wavenumber `K`.
    pub fn max_mode(&self) -> i64 {
        (self.n / 2 - 1) as i64
    }

    /// Number of retained modes, `2K + 1`.
    pub fn mode_count(&self) -> usize {
        self.n - 1
    }

    pub fn modes(&self) -> std::ops::RangeInclusive<i64> {
        -self.max_mode()..=self.max_mode()
    }

    pub fn node(&self, j: usize) -> f64 {
        self.spacing() * j as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.node(j))
    }

    /// Largest band `|k| <= B` whose pairwise products are alias-free on this
    /// grid (the 2/3 rule): `3B < n`.
    pub fn two_thirds_band(&self) -> i64 {
        ((self.n - 2) / 3) as i64
    }

    /// Band kept by a dealiasing cutoff `fraction` of `K`.
    pub fn band_for_fraction(&self, fraction: f64) -> i64 {
        let band = (fraction * self.max_mode() as f64 + 1e-9).floor() as i64;
        band.clamp(0, self.max_mode())
    }

    pub(crate) fn padded_len(&self) -> usize {
        Self::padded_len_for(self.n)
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::GridMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }

    /// Values at the nodes of a length-`len` grid of the trigonometric
    /// polynomial with coefficients `coeffs` (indexed `k + K`, `|k| <= K`).
    pub(crate) fn evaluate_on(&self, coeffs: &[Complex64], len: usize) -> Vec<Complex64> {
        let k_max = self.max_mode();
        let mut buf = vec![Complex64::new(0.0, 0.0); len];
        for (i, &c) in coeffs.iter().enumerate() {
            let k = i as i64 - k_max;
            buf[k.rem_euclid(len as i64) as usize] = c;
        }
        let plan = if len == self.n {
            &self.plans.inverse
        } else {
            debug_assert_eq!(len, self.padded_len());
            &self.plans.padded_inverse
        };
        plan.process(&mut buf);
        buf
    }

    /// Normalized coefficients `(1/len) Σ_j f_j e^{-ikx_j}` for `|k| <= K` of
    /// real samples on a length-`len` grid, with exact Hermitian symmetry.
    pub(crate) fn coefficients_from(&self, samples: &[f64]) -> Vec<Complex64> {
        let len = samples.len();
        let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
        let plan = if len == self.n {
            &self.plans.forward
        } else {
            debug_assert_eq!(len, self.padded_len());
            &self.plans.padded_forward
        };
        plan.process(&mut buf);
        let scale = 1.0 / len as f64;
        let k_max = self.max_mode();
        let at = |k: i64| buf[k.rem_euclid(len as i64) as usize] * scale;
        let mut out = vec![Complex64::new(0.0, 0.0); self.mode_count()];
        out[k_max as usize] = Complex64::new(at(0).re, 0.0);
        for k in 1..=k_max {
            let c = 0.5 * (at(k) + at(-k).conj());
            out[(k_max + k) as usize] = c;
            out[(k_max - k) as usize] = c.conj();
        }
        out
    }
}
