//! Catalog of initial data `(φ⁽⁰⁾, φ⁽¹⁾)`.

use num_complex::Complex64;

use crate::ensemble::BandSpec;
use crate::error::{Error, Result};
use crate::evolution::data_size_squared;
use crate::rng::SplitMix64;
use crate::spectral::{Grid, PeriodicField, Spectrum};

#[derive(Debug, Clone, PartialEq)]
pub enum InitialShape {
    /// `a cos(kx + θ)`.
    SingleMode { amplitude: f64, mode: i64, phase: f64 },
    /// `Σ a_j cos(k_j x + θ_j)`.
    MultiMode { terms: Vec<(f64, i64, f64)> },
    /// `amplitude` times a seeded random spectrum on a band.
    RandomBand { seed: u64, band: BandSpec, amplitude: f64 },
}

/// How `φ⁽¹⁾` is derived from `φ⁽⁰⁾`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Velocity {
    #[default]
    Zero,
    /// Right-moving linear wave: `φ⁽¹⁾ = −√μ φ⁽⁰⁾_x` (requires `μ >= 0`).
    Traveling,
    /// Pure growing linear mode for `μ < 0`: `φ̂⁽¹⁾(k) = |k|√|μ| φ̂⁽⁰⁾(k)`.
    Growing,
}

impl std::str::FromStr for Velocity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "zero" => Ok(Velocity::Zero),
            "traveling" => Ok(Velocity::Traveling),
            "growing" => Ok(Velocity::Growing),
            other => Err(Error::InvalidParameter(format!(
                "unknown velocity `{other}` (expected zero, traveling or growing)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialDataSpec {
    pub shape: InitialShape,
    pub velocity: Velocity,
}

impl InitialDataSpec {
    pub fn single_mode(amplitude: f64, mode: i64, phase: f64) -> Self {
        Self {
            shape: InitialShape::SingleMode { amplitude, mode, phase },
            velocity: Velocity::Zero,
        }
    }

    pub fn with_velocity(mut self, velocity: Velocity) -> Self {
        self.velocity = velocity;
        self
    }

    /// Replaces the seed of a random-band shape; other shapes are unchanged.
    pub fn with_seed(mut self, seed: u64) -> Self {
        if let InitialShape::RandomBand { seed: s, .. } = &mut self.shape {
            *s = seed;
        }
        self
    }

    /// Same data multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let shape = match &self.shape {
            InitialShape::SingleMode { amplitude, mode, phase } => InitialShape::SingleMode {
                amplitude: amplitude * factor,
                mode: *mode,
                phase: *phase,
            },
            InitialShape::MultiMode { terms } => InitialShape::MultiMode {
                terms: terms.iter().map(|&(a, k, p)| (a * factor, k, p)).collect(),
            },
            InitialShape::RandomBand { seed, band, amplitude } => InitialShape::RandomBand {
                seed: *seed,
                band: *band,
                amplitude: amplitude * factor,
            },
        };
        Self {
            shape,
            velocity: self.velocity,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub phi0: PeriodicField,
    pub phi1: PeriodicField,
    /// `‖φ⁽⁰⁾_x‖²_{H²} + ‖φ⁽¹⁾‖²_{H²}`, the size the lifespan estimate uses.
    pub size_squared: f64,
}

fn check_mode(k: i64, grid: &Grid) -> Result<()> {
    if k < 1 || k >= grid.max_mode() {
        return Err(Error::InvalidParameter(format!(
            "mode {k} must satisfy 1 <= k < K = {}",
            grid.max_mode()
        )));
    }
    Ok(())
}

/// Builds `(φ⁽⁰⁾, φ⁽¹⁾)` on `grid`; `mu` is needed by the derived velocities.
pub fn materialize(spec: &InitialDataSpec, grid: &Grid, mu: f64) -> Result<InitialData> {
    let phi = match &spec.shape {
        InitialShape::SingleMode { amplitude, mode, phase } => {
            check_mode(*mode, grid)?;
            Spectrum::from_cosines(grid, &[(*amplitude, *mode, *phase)])?
        }
        InitialShape::MultiMode { terms } => {
            for &(_, k, _) in terms {
                check_mode(k, grid)?;
            }
            Spectrum::from_cosines(grid, terms)?
        }
        InitialShape::RandomBand { seed, band, amplitude } => {
            check_mode(band.band.1, grid)?;
            band.sample(grid, &mut SplitMix64::new(*seed))?.scaled(*amplitude)
        }
    };
    let rate = match spec.velocity {
        Velocity::Zero => Spectrum::zeros(grid),
        Velocity::Traveling => {
            if mu < 0.0 {
                return Err(Error::InvalidParameter(format!("traveling velocity needs mu >= 0, got {mu}")));
            }
            phi.derivative(1).scaled(-mu.sqrt())
        }
        Velocity::Growing => {
            let rate = mu.abs().sqrt();
            phi.map_modes(|k| Complex64::new(rate * k.abs() as f64, 0.0))
        }
    };
    let phi0 = PeriodicField::from_spectrum(phi)?;
    let phi1 = PeriodicField::from_spectrum(rate)?;
    let size_squared = data_size_squared(&phi0, &phi1);
    Ok(InitialData { phi0, phi1, size_squared })
}
