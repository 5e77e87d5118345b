//! The quadratic operator `Q[φ] = −3[H; φ̃_x]φ̃_xx − [H; φ̃]φ̃_xxx`, `φ̃ = H[φ]`,
//! in frequency-space and commutator form, and its bilinear kernel.

use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hilbert::commutator_spectrum;
use crate::spectral::{product, PeriodicField, ProductRule, Spectrum};

/// Largest `|f̂(0)|`, relative to `max(1, max|f̂|)`, accepted as zero mean.
pub const MEAN_TOLERANCE: f64 = 1e-12;

/// Sign sector of a frequency pair `(m, ℓ)`. The symmetrized kernel vanishes
/// unless `m` and `ℓ` have opposite signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    /// `m < 0 < ℓ`, `m + ℓ > 0`.
    FI,
    /// `m < 0 < ℓ`, `m + ℓ <= 0`.
    FII,
    /// `ℓ < 0 < m`, `m + ℓ <= 0`.
    FIII,
    /// `ℓ < 0 < m`, `m + ℓ > 0`.
    FIV,
    /// `mℓ >= 0`.
    Zero,
}

impl Region {
    pub fn label(&self) -> &'static str {
        match self {
            Region::FI => "F_I",
            Region::FII => "F_II",
            Region::FIII => "F_III",
            Region::FIV => "F_IV",
            Region::Zero => "ZERO",
        }
    }
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn region_classify(m: i64, l: i64) -> Region {
    match (m.signum(), l.signum(), m + l > 0) {
        (-1, 1, true) => Region::FI,
        (-1, 1, false) => Region::FII,
        (1, -1, false) => Region::FIII,
        (1, -1, true) => Region::FIV,
        _ => Region::Zero,
    }
}

fn lambda_wide(m: i64, l: i64) -> i128 {
    let (m, l) = (m as i128, l as i128);
    -((m + l).signum() - l.signum()) * l * l * (3 * m + l) * m.signum() * l.signum()
}

fn narrow(value: i128, m: i64, l: i64) -> Result<i64> {
    i64::try_from(value).map_err(|_| Error::KernelOverflow { m, l })
}

/// `Λ(m, ℓ) = −(sgn(m+ℓ) − sgn ℓ) ℓ² (3m+ℓ) sgn m sgn ℓ`, exactly.
pub fn kernel_lambda_exact(m: i64, l: i64) -> Result<i64> {
    narrow(lambda_wide(m, l), m, l)
}

/// `Λ̃(m, ℓ) = (Λ(m, ℓ) + Λ(ℓ, m)) / 2`, exactly. The sum is always even.
pub fn kernel_lambda_sym_exact(m: i64, l: i64) -> Result<i64> {
    let twice = lambda_wide(m, l) + lambda_wide(l, m);
    debug_assert_eq!(twice % 2, 0);
    narrow(twice / 2, m, l)
}

/// `m²(3ℓ + m)`, the value of `Λ̃` on [`Region::FI`].
pub fn kernel_sym_first_region(m: i64, l: i64) -> Result<i64> {
    let (mw, lw) = (m as i128, l as i128);
    narrow(mw * mw * (3 * lw + mw), m, l)
}

pub fn kernel_lambda(m: i64, l: i64) -> f64 {
    lambda_wide(m, l) as f64
}

pub fn kernel_lambda_sym(m: i64, l: i64) -> f64 {
    ((lambda_wide(m, l) + lambda_wide(l, m)) / 2) as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint {
    pub m: i64,
    pub l: i64,
    pub region: Region,
    pub lambda: f64,
    pub lambda_sym: f64,
}

impl KernelPoint {
    pub fn new(m: i64, l: i64) -> Result<Self> {
        Ok(Self {
            m,
            l,
            region: region_classify(m, l),
            lambda: kernel_lambda_exact(m, l)? as f64,
            lambda_sym: kernel_lambda_sym_exact(m, l)? as f64,
        })
    }

    pub const CSV_HEADER: &'static str = "m,l,region,lambda,lambda_sym";

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{}", self.m, self.l, self.region, self.lambda, self.lambda_sym)
    }
}

/// Kernel points for `m` in `m_range` and `ℓ` in `l_range`, row-major in `m`.
pub fn kernel_dump(m_range: (i64, i64), l_range: (i64, i64)) -> Result<Vec<KernelPoint>> {
    let mut out = Vec::new();
    for m in m_range.0..=m_range.1 {
        for l in l_range.0..=l_range.1 {
            out.push(KernelPoint::new(m, l)?);
        }
    }
    Ok(out)
}

fn ensure_zero_mean(spectrum: &Spectrum) -> Result<()> {
    let mean = spectrum.mean();
    if mean.abs() > MEAN_TOLERANCE * spectrum.max_abs().max(1.0) {
        return Err(Error::NonZeroMean { mean });
    }
    Ok(())
}

/// `Q̂` from the reduced frequency sums: for `k > 0`,
/// `Q̂(k) = 2 Σ_{ℓ>k} (k−ℓ)²(k+2ℓ) φ̂(k−ℓ) φ̂(ℓ)`; `Q̂(−k)` is its conjugate;
/// `Q̂(0) = 2 Σ |ℓ|³ φ̂(−ℓ) φ̂(ℓ)`.
///
/// Modes of the exact product beyond `K` are dropped. O(K²), parallel over `k`.
pub fn q_spectral_spectrum(phi: &Spectrum) -> Result<Spectrum> {
    ensure_zero_mean(phi)?;
    let k_max = phi.max_mode();
    let positive: Vec<Complex64> = (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let sum: Complex64 = (k + 1..=k_max)
                .map(|l| {
                    let d = (k - l) as f64;
                    phi.get(k - l) * phi.get(l) * (d * d * (k + 2 * l) as f64)
                })
                .sum();
            2.0 * sum
        })
        .collect();
    let zero: f64 = (1..=k_max)
        .map(|l| {
            let l3 = (l * l * l) as f64;
            // Terms at ℓ and −ℓ are equal: 2|ℓ|³|φ̂(ℓ)|² each.
            2.0 * l3 * phi.get(l).norm_sqr()
        })
        .sum::<f64>()
        * 2.0;
    let mut q = Spectrum::zeros(phi.grid());
    q.set(0, Complex64::new(zero, 0.0))?;
    for (k, c) in (1..=k_max).zip(positive) {
        q.set(k, c)?;
        q.set(-k, c.conj())?;
    }
    Ok(q)
}

pub fn q_spectral(field: &PeriodicField) -> Result<PeriodicField> {
    PeriodicField::from_spectrum(q_spectral_spectrum(field.spectrum())?)
}

/// `Q̂(k) = Σ_ℓ Λ̃(k−ℓ, ℓ) φ̂(k−ℓ) φ̂(ℓ)`: the unreduced double sum over the
/// symmetrized kernel, on the retained band.
pub fn q_kernel_sum(phi: &Spectrum) -> Result<Spectrum> {
    let k_max = phi.max_mode();
    let coeffs: Vec<Complex64> = phi
        .grid()
        .modes()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|k| {
            let lo = (k - k_max).max(-k_max);
            let hi = (k + k_max).min(k_max);
            (lo..=hi)
                .map(|l| phi.get(k - l) * phi.get(l) * kernel_lambda_sym(k - l, l))
                .sum()
        })
        .collect();
    Spectrum::from_coeffs(phi.grid(), coeffs)
}

/// `Q[φ]` from its commutator definition, products under `rule`.
pub fn q_commutator_spectrum(phi: &Spectrum, rule: ProductRule) -> Result<Spectrum> {
    let ht = phi.hilbert();
    let first = commutator_spectrum(&ht.derivative(1), &ht.derivative(2), rule)?;
    let second = commutator_spectrum(&ht, &ht.derivative(3), rule)?;
    let mut q = first.scaled(-3.0);
    q.axpy(-1.0, &second)?;
    Ok(q)
}

pub fn q_commutator(field: &PeriodicField, rule: ProductRule) -> Result<PeriodicField> {
    PeriodicField::from_spectrum(q_commutator_spectrum(field.spectrum(), rule)?)
}

/// Nonlinear flux `(½H[φ̃²]_xx + φ̃ φ_xx)_x`, products under `rule`.
pub fn flux_rhs_spectrum(phi: &Spectrum, rule: ProductRule) -> Result<Spectrum> {
    let ht = phi.hilbert();
    let square = product(&ht, &ht, rule)?.hilbert().derivative(2).scaled(0.5);
    let mixed = product(&ht, &phi.derivative(2), rule)?;
    Ok(square.plus(&mixed)?.derivative(1))
}

pub fn flux_rhs(field: &PeriodicField, rule: ProductRule) -> Result<PeriodicField> {
    PeriodicField::from_spectrum(flux_rhs_spectrum(field.spectrum(), rule)?)
}

/// `−2φ̃_x φ_xx`, the part of the flux that is not in `Q`.
pub fn transport_term(phi: &Spectrum, rule: ProductRule) -> Result<Spectrum> {
    Ok(product(&phi.hilbert().derivative(1), &phi.derivative(2), rule)?.scaled(-2.0))
}

/// `Q` recovered from the flux: `Q = −flux − 2φ̃_x φ_xx`.
pub fn q_from_flux(phi: &Spectrum, rule: ProductRule) -> Result<Spectrum> {
    let flux = flux_rhs_spectrum(phi, rule)?;
    transport_term(phi, rule)?.minus(&flux)
}
