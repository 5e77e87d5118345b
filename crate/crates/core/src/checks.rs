//! Randomized identity suite over the operator layer, with one worst-case
//! residual per identity.

use rayon::prelude::*;

use crate::ensemble::BandSpec;
use crate::error::Result;
use crate::evolution::{Dynamics, Mode};
use crate::hilbert::{
    adjoint_check, commutator_direct, commutator_self_adjoint_check, commutator_spectrum, hilbert_squared_check,
    product_identity_check,
};
use crate::quadratic::{
    flux_rhs_spectrum, kernel_lambda_exact, kernel_lambda_sym_exact, kernel_sym_first_region, q_commutator_spectrum,
    q_from_flux, q_spectral_spectrum, region_classify, Region,
};
use crate::rng::SplitMix64;
use crate::spectral::{analyze, parseval_pair, synthesize, Grid, PeriodicField, ProductRule, Spectrum};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub n_points: usize,
    pub trials: usize,
    pub seed: u64,
    /// Kernel identities are checked for `|m|, |ℓ| <= kernel_range`.
    pub kernel_range: i64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            n_points: 128,
            trials: 500,
            seed: 2024,
            kernel_range: 512,
        }
    }
}

/// Worst value of `f(i)` over `0..trials`, evaluated in parallel.
fn worst(trials: usize, f: impl Fn(u64) -> Result<f64> + Sync + Send) -> Result<f64> {
    let values = (0..trials as u64).into_par_iter().map(f).collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().fold(0.0, f64::max))
}

fn random(grid: &Grid, band: &BandSpec, rng: &mut SplitMix64) -> Result<PeriodicField> {
    band.sample_field(grid, rng)
}

/// Kernel identity violations for `|m|, |ℓ| <= range`: symmetry, reality,
/// vanishing off opposite-sign pairs, and the closed form on the first region.
pub fn kernel_violations(range: i64) -> Result<usize> {
    let per_row = (-range..=range)
        .into_par_iter()
        .map(|m| {
            let mut bad = 0usize;
            for l in -range..=range {
                let s = kernel_lambda_sym_exact(m, l)?;
                let region = region_classify(m, l);
                bad += usize::from(s != kernel_lambda_sym_exact(l, m)?);
                bad += usize::from(s != kernel_lambda_sym_exact(-m, -l)?);
                bad += usize::from((m * l >= 0) != (region == Region::Zero));
                bad += usize::from(region == Region::Zero && s != 0);
                bad += usize::from(region == Region::FI && s != kernel_sym_first_region(m, l)?);
                bad += usize::from(2 * s != kernel_lambda_exact(m, l)? + kernel_lambda_exact(l, m)?);
            }
            Ok(bad)
        })
        .collect::<Result<Vec<usize>>>()?;
    Ok(per_row.into_iter().sum())
}

pub fn identity_suite(config: &SuiteConfig) -> Result<Vec<CheckOutcome>> {
    let grid = Grid::new(config.n_points)?;
    let band = BandSpec::new(1, grid.two_thirds_band(), 2.0)?;
    let full = BandSpec::new(1, grid.max_mode(), 2.0)?;
    let n = config.trials;
    let seed = config.seed;
    let rng = |i: u64| SplitMix64::for_trial(seed, i);
    let mut out = Vec::new();
    let mut push = |name, cases, worst, tolerance| {
        out.push(CheckOutcome {
            name,
            cases,
            worst,
            tolerance,
        })
    };

    let w = worst(n, |i| {
        let mut r = rng(i);
        let f = random(&grid, &full, &mut r)?;
        let mean = r.uniform(-1.0, 1.0);
        let samples: Vec<f64> = f.samples().iter().map(|v| v + mean).collect();
        let back = synthesize(&analyze(&grid, &samples)?)?;
        let scale = samples.iter().map(|v| v.abs()).fold(0.0, f64::max);
        Ok(back.samples().iter().zip(&samples).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale)
    })?;
    push("analyze/synthesize roundtrip", n, w, 1e-12);

    let w = worst(n, |i| {
        let f = random(&grid, &full, &mut rng(i))?;
        let (quad, spec) = parseval_pair(&f);
        Ok((quad - spec).abs() / quad)
    })?;
    push("Parseval", n, w, 1e-10);

    let w = worst(n, |i| {
        let mut r = rng(i);
        let f = random(&grid, &full, &mut r)?;
        let mut s = f.spectrum().clone();
        s.set(0, r.uniform(-1.0, 1.0).into())?;
        let f = PeriodicField::from_spectrum(s)?;
        Ok(hilbert_squared_check(&f) / f.sobolev_norm(0.0))
    })?;
    push("H^2 f = -(f - mean)", n, w, 1e-12);

    let w = worst(n, |i| {
        let mut r = rng(i);
        let (f, g) = (random(&grid, &band, &mut r)?, random(&grid, &band, &mut r)?);
        Ok(product_identity_check(&f, &g, ProductRule::TwoThirds)? / (f.sobolev_norm(0.0) * g.sobolev_norm(0.0)))
    })?;
    push("product identity", n, w, 1e-10);

    let w = worst(n, |i| {
        let mut r = rng(i);
        let (f, g) = (random(&grid, &full, &mut r)?, random(&grid, &full, &mut r)?);
        Ok(adjoint_check(&f, &g)? / (f.sobolev_norm(0.0) * g.sobolev_norm(0.0)))
    })?;
    push("Hilbert adjoint", n, w, 1e-10);

    let w = worst(n, |i| {
        let mut r = rng(i);
        let h = random(&grid, &band, &mut r)?;
        let (f, g) = (random(&grid, &band, &mut r)?, random(&grid, &band, &mut r)?);
        let scale = h.max_abs() * f.sobolev_norm(0.0) * g.sobolev_norm(0.0);
        Ok(commutator_self_adjoint_check(&h, &f, &g, ProductRule::TwoThirds)? / scale)
    })?;
    push("commutator self-adjointness", n, w, 1e-10);

    let w = worst(n, |i| {
        let mut r = rng(i);
        let v = random(&grid, &full, &mut r)?;
        let f = random(&grid, &full, &mut r)?;
        let u = f.spectrum().derivative((i % 4) as u32);
        let direct = commutator_direct(v.spectrum(), &u)?;
        let fast = commutator_spectrum(v.spectrum(), &u, ProductRule::Padded)?;
        Ok(direct.max_deviation(&fast)? / direct.max_abs().max(f64::MIN_POSITIVE))
    })?;
    push("commutator direct vs FFT", n, w, 1e-10);

    let three_way = worst(n.min(200), |i| {
        let phi = band.sample(&grid, &mut rng(i))?;
        let b = grid.two_thirds_band();
        let a = q_spectral_spectrum(&phi)?.truncated(b);
        let c = q_commutator_spectrum(&phi, ProductRule::TwoThirds)?;
        let d = q_from_flux(&phi, ProductRule::TwoThirds)?;
        let scale = a.max_abs();
        Ok(a.max_deviation(&c)?.max(a.max_deviation(&d)?) / scale)
    })?;
    push("Q three-way equivalence", n.min(200), three_way, 1e-10);

    let mut closed = 0.0f64;
    for k in 1..=8i64 {
        for a in [0.5, 1.0, 2.0] {
            let phi = Spectrum::from_cosines(&grid, &[(a, k, 0.0)])?;
            let unit = a * a * (k * k * k) as f64;
            for q in [
                q_spectral_spectrum(&phi)?,
                q_commutator_spectrum(&phi, ProductRule::TwoThirds)?,
            ] {
                let f = synthesize(&q)?;
                let dev = f.samples().iter().map(|v| (v - unit).abs()).fold(0.0, f64::max);
                closed = closed.max(dev / unit);
            }
        }
    }
    push("Q[a cos kx] = a^2 k^3", 24, closed, 1e-12);

    let bad = kernel_violations(config.kernel_range)?;
    let side = (2 * config.kernel_range + 1) as usize;
    push("kernel identities", side * side, bad as f64, 0.0);

    let w = worst(n, |i| {
        let phi = band.sample(&grid, &mut rng(i))?;
        let dynamics = Dynamics::new(1.0, Mode::SecondOrder, ProductRule::TwoThirds);
        Ok(dynamics.acceleration(&phi)?.get(0).norm())
    })?;
    push("zero-mode cancellation", n, w, 1e-12);

    let w = worst(n, |i| {
        let phi = band.sample(&grid, &mut rng(i))?;
        Ok(flux_rhs_spectrum(&phi, ProductRule::TwoThirds)?.get(0).norm())
    })?;
    push("flux zero mode", n, w, 1e-13);

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let config = SuiteConfig {
            n_points: 32,
            trials: 20,
            seed: 1,
            kernel_range: 20,
        };
        let outcomes = identity_suite(&config).unwrap();
        for o in &outcomes {
            assert!(o.passed(), "{} worst {:e} > {:e}", o.name, o.worst, o.tolerance);
        }
        assert_eq!(outcomes.len(), 12);
    }
}
