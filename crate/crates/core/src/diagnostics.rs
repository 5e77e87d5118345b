//! Weighted energy, Riccati-type growth bound, and planar stability margins.

use crate::error::{Error, Result};
use crate::evolution::{stability_report, SolverState};
use crate::spectral::{product, ProductRule};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub t: f64,
    /// `E_r = ‖φ_t‖²_{H^r} + ∫(μ − 2φ̃_x)|<∂ₓ>^r φ_x|² dx`.
    pub energy: f64,
    /// `√E_r`, or `−√(−E_r)` if the weight is negative enough to make the
    /// energy negative.
    pub y: f64,
    /// `(‖φ_x‖_{H^r}, ‖φ_t‖_{H^r})`.
    pub h_r_norms: (f64, f64),
    /// `min (μ − 2φ̃_x)`.
    pub margin: f64,
}

/// Weighted energy of index `r`. The weighted integral is evaluated from the
/// exact product of band-limited factors, so it equals the continuum integral
/// of the trigonometric polynomials.
pub fn energy(state: &SolverState, mu: f64, r: f64) -> EnergyReport {
    let phi = state.phi.spectrum();
    let g = phi.derivative(1).bracket_power(r);
    let slope = phi.hilbert().derivative(1);
    let g_sq = product(&g, &g, ProductRule::Padded).expect("same grid");
    let weighted = mu * g.sobolev_norm(0.0).powi(2) - 2.0 * slope.inner(&g_sq).expect("same grid");
    let phi_t_norm = state.phi_t.sobolev_norm(r);
    let energy = phi_t_norm.powi(2) + weighted;
    EnergyReport {
        t: state.t,
        energy,
        y: energy.signum() * energy.abs().sqrt(),
        h_r_norms: (g.sobolev_norm(0.0), phi_t_norm),
        margin: stability_report(&state.phi, mu, 0.0).margin,
    }
}

/// Norm-equivalence bracket `lower <= E <= upper` with
/// `lower = min(1, δ)·N`, `upper = (μ + 2‖φ̃_x‖_∞ + 1)·N`,
/// `N = ‖φ_x‖²_{H^r} + ‖φ_t‖²_{H^r}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyBounds {
    pub lower: f64,
    pub energy: f64,
    pub upper: f64,
}

pub fn energy_bounds(state: &SolverState, mu: f64, delta: f64, r: f64) -> EnergyBounds {
    let report = energy(state, mu, r);
    let (a, b) = report.h_r_norms;
    let norms = a * a + b * b;
    let slope = crate::spectral::PeriodicField::from_spectrum(state.phi.spectrum().hilbert().derivative(1))
        .expect("Hermitian symbol keeps the spectrum Hermitian");
    EnergyBounds {
        lower: delta.min(1.0) * norms,
        energy: report.energy,
        upper: (mu + 2.0 * slope.max_abs() + 1.0) * norms,
    }
}

/// One sample of a trajectory as seen by [`riccati_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub y: f64,
    pub margin: f64,
}

impl From<&EnergyReport> for TrajectorySample {
    fn from(e: &EnergyReport) -> Self {
        Self {
            t: e.t,
            y: e.y,
            margin: e.margin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiRow {
    pub t: f64,
    pub y: f64,
    pub dy_dt: f64,
    /// `y(0)/(1 − Ĉ t y(0))`, infinite past the bound's blowup time.
    pub bound: f64,
    /// `None` outside the window `1 − Ĉ t y(0) >= ½`.
    pub bound_ok: Option<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RiccatiReport {
    /// `max (dy/dt)/y²`, clipped at zero.
    pub c_hat: f64,
    pub rows: Vec<RiccatiRow>,
    /// `Some(reason)` when the hypotheses fail and nothing was checked.
    pub skipped: Option<String>,
}

impl RiccatiReport {
    /// True when checked and every sample in the window satisfies the bound.
    pub fn holds(&self) -> bool {
        self.skipped.is_none() && self.rows.iter().all(|r| r.bound_ok != Some(false))
    }
}

/// Minimum number of samples for a meaningful finite-difference derivative.
pub const MIN_RICCATI_SAMPLES: usize = 100;

/// Relative slack allowed in `y(t) <= y(0)/(1 − Ĉ t y(0))`.
pub const RICCATI_TOLERANCE: f64 = 1e-6;

/// Finite-difference `dy/dt`: centered (three-point, non-uniform) inside,
/// one-sided at the ends.
pub fn time_derivative(t: &[f64], y: &[f64]) -> Vec<f64> {
    let n = t.len();
    if n < 2 {
        return vec![0.0; n];
    }
    (0..n)
        .map(|i| {
            if i == 0 {
                (y[1] - y[0]) / (t[1] - t[0])
            } else if i == n - 1 {
                (y[n - 1] - y[n - 2]) / (t[n - 1] - t[n - 2])
            } else {
                let (h0, h1) = (t[i] - t[i - 1], t[i + 1] - t[i]);
                (h0 * h0 * (y[i + 1] - y[i]) + h1 * h1 * (y[i] - y[i - 1])) / (h0 * h1 * (h0 + h1))
            }
        })
        .collect()
}

/// Fits `Ĉ` in `dy/dt <= Ĉ y²` and checks the integrated bound while
/// `1 − Ĉ t y(0) >= ½`. Skipped if the margin falls below `delta` anywhere.
pub fn riccati_check(samples: &[TrajectorySample], delta: f64) -> Result<RiccatiReport> {
    if samples.len() < MIN_RICCATI_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "Riccati check needs at least {MIN_RICCATI_SAMPLES} samples, got {}",
            samples.len()
        )));
    }
    if samples.windows(2).any(|w| !(w[1].t > w[0].t)) {
        return Err(Error::InvalidParameter("sample times must increase strictly".into()));
    }
    let t: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.y).collect();
    let dy = time_derivative(&t, &y);
    if let Some(s) = samples.iter().find(|s| s.margin < delta) {
        return Ok(RiccatiReport {
            c_hat: 0.0,
            rows: Vec::new(),
            skipped: Some(format!(
                "margin {:.6e} below delta = {delta} at t = {}",
                s.margin, s.t
            )),
        });
    }
    let c_hat = y
        .iter()
        .zip(&dy)
        .filter(|(y, _)| **y > 0.0)
        .map(|(y, d)| d / (y * y))
        .fold(0.0, f64::max);
    let (t0, y0) = (t[0], y[0]);
    let rows = samples
        .iter()
        .zip(&dy)
        .map(|(s, &dy_dt)| {
            let denom = 1.0 - c_hat * (s.t - t0) * y0;
            let bound = if denom > 0.0 { y0 / denom } else { f64::INFINITY };
            let bound_ok = (denom >= 0.5).then(|| s.y <= bound + RICCATI_TOLERANCE * bound.abs());
            RiccatiRow {
                t: s.t,
                y: s.y,
                dy_dt,
                bound,
                bound_ok,
            }
        })
        .collect();
    Ok(RiccatiReport {
        c_hat,
        rows,
        skipped: None,
    })
}

/// Constant states `(U±, B±)` on either side of a planar sheet.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlanarState {
    pub u_plus: f64,
    pub u_minus: f64,
    pub b_plus: f64,
    pub b_minus: f64,
}

impl PlanarState {
    pub fn new(u_plus: f64, u_minus: f64, b_plus: f64, b_minus: f64) -> Self {
        Self {
            u_plus,
            u_minus,
            b_plus,
            b_minus,
        }
    }
}

/// `Δ = ½(|B⁺|² + |B⁻|²) − ¼|U⁺ − U⁻|²`; positive iff the strict planar
/// stability inequality `|U⁺ − U⁻|² < 2(|B⁺|² + |B⁻|²)` holds.
pub fn syrovatskii_delta(s: &PlanarState) -> f64 {
    0.5 * (s.b_plus * s.b_plus + s.b_minus * s.b_minus) - 0.25 * (s.u_plus - s.u_minus).powi(2)
}

/// Largest `|Δ|` accepted as being on the transition manifold.
pub const TRANSITION_TOLERANCE: f64 = 1e-9;

/// `μ = B₀⁺B₁⁺ + B₀⁻B₁⁻ − ½(U₀⁺ − U₀⁻)(U₁⁺ − U₁⁻)`, the first-order change
/// of `Δ` along `zeroth + ε·first`, for `zeroth` on `Δ = 0`.
pub fn bifurcation_mu(zeroth: &PlanarState, first: &PlanarState) -> Result<f64> {
    let delta = syrovatskii_delta(zeroth);
    if delta.abs() > TRANSITION_TOLERANCE {
        return Err(Error::OffTransitionManifold { delta });
    }
    Ok(zeroth.b_plus * first.b_plus + zeroth.b_minus * first.b_minus
        - 0.5 * (zeroth.u_plus - zeroth.u_minus) * (first.u_plus - first.u_minus))
}
