//! Empirical constants of commutator and quadratic-term estimates over seeded
//! random ensembles.

use std::fmt;

use rayon::prelude::*;

use crate::ensemble::{guarded_ratio, BandSpec, RatioStats};
use crate::error::{Error, Result};
use crate::hilbert::commutator_spectrum;
use crate::quadratic::q_spectral_spectrum;
use crate::rng::SplitMix64;
use crate::spectral::{product, Grid, ProductRule, Spectrum};

/// Which inequality a ratio measures. `σ` doubles as `r` where the estimate
/// is stated in terms of `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimate {
    /// `‖[H; v]f‖_{L²} <= C ‖v‖_{H^σ} ‖f‖_{L²}`, `σ > 1/2`.
    CommutatorL2,
    /// `‖[H; v]f_x‖_{L²} <= C ‖v_x‖_{H^σ} ‖f‖_{L²}`, `σ > 1/2`.
    CommutatorL2Derivative,
    /// `‖[H; v]∂ᵖf‖_{H^σ} <= C ‖∂ᵖv‖_{H^σ} ‖f‖_{H¹}`.
    CommutatorSmoothData,
    /// `‖[H; v]∂ᵖf‖_{H^σ} <= C ‖∂ᵖv‖_{H^{σ+1}} ‖f‖_{L²}`.
    CommutatorRoughData,
    /// `‖[<∂>^r; v]f‖_{L²} <= C (‖v‖_{H^r}‖f‖_{H¹} + ‖v_x‖_{H¹}‖f‖_{H^{r−1}})`, `r >= 1`.
    BracketCommutator,
    /// `‖Q[φ]‖_{H^r} <= C ‖φ_x‖_{H²} ‖φ_x‖_{H^r}`.
    Quadratic,
}

impl Estimate {
    pub const ALL: [Estimate; 6] = [
        Estimate::CommutatorL2,
        Estimate::CommutatorL2Derivative,
        Estimate::CommutatorSmoothData,
        Estimate::CommutatorRoughData,
        Estimate::BracketCommutator,
        Estimate::Quadratic,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Estimate::CommutatorL2 => "hilbert_commutator_l2",
            Estimate::CommutatorL2Derivative => "hilbert_commutator_l2_dx",
            Estimate::CommutatorSmoothData => "hilbert_commutator_hs",
            Estimate::CommutatorRoughData => "hilbert_commutator_hs_l2data",
            Estimate::BracketCommutator => "bracket_commutator",
            Estimate::Quadratic => "quadratic_hr",
        }
    }

    pub fn check_parameters(&self, sigma: f64, p: u32) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match self {
            Estimate::CommutatorL2 | Estimate::CommutatorL2Derivative if sigma <= 0.5 => {
                bad(format!("{} needs sigma > 1/2, got {sigma}", self.label()))
            }
            Estimate::BracketCommutator if sigma < 1.0 => bad(format!("{} needs r >= 1, got {sigma}", self.label())),
            Estimate::CommutatorSmoothData | Estimate::CommutatorRoughData | Estimate::Quadratic if sigma < 0.0 => {
                bad(format!("{} needs a nonnegative index, got {sigma}", self.label()))
            }
            Estimate::CommutatorL2 | Estimate::CommutatorL2Derivative | Estimate::BracketCommutator | Estimate::Quadratic
                if p != 0 =>
            {
                bad(format!("{} takes no derivative order, got p = {p}", self.label()))
            }
            _ => Ok(()),
        }
    }

    /// Ratio of the two sides for one ensemble member; `None` for 0/0.
    /// `Quadratic` uses `v` as `φ` and ignores `f`.
    pub fn ratio(&self, v: &Spectrum, f: &Spectrum, sigma: f64, p: u32) -> Result<Option<f64>> {
        self.check_parameters(sigma, p)?;
        let exact = ProductRule::Padded;
        let (num, den) = match self {
            Estimate::CommutatorL2 => (
                commutator_spectrum(v, f, exact)?.sobolev_norm(0.0),
                v.sobolev_norm(sigma) * f.sobolev_norm(0.0),
            ),
            Estimate::CommutatorL2Derivative => (
                commutator_spectrum(v, &f.derivative(1), exact)?.sobolev_norm(0.0),
                v.derivative(1).sobolev_norm(sigma) * f.sobolev_norm(0.0),
            ),
            Estimate::CommutatorSmoothData => (
                commutator_spectrum(v, &f.derivative(p), exact)?.sobolev_norm(sigma),
                v.derivative(p).sobolev_norm(sigma) * f.sobolev_norm(1.0),
            ),
            Estimate::CommutatorRoughData => (
                commutator_spectrum(v, &f.derivative(p), exact)?.sobolev_norm(sigma),
                v.derivative(p).sobolev_norm(sigma + 1.0) * f.sobolev_norm(0.0),
            ),
            Estimate::BracketCommutator => {
                let lhs = product(v, f, exact)?
                    .bracket_power(sigma)
                    .minus(&product(v, &f.bracket_power(sigma), exact)?)?;
                (
                    lhs.sobolev_norm(0.0),
                    v.sobolev_norm(sigma) * f.sobolev_norm(1.0)
                        + v.derivative(1).sobolev_norm(1.0) * f.sobolev_norm(sigma - 1.0),
                )
            }
            Estimate::Quadratic => {
                let phi_x = v.derivative(1);
                (
                    q_spectral_spectrum(v)?.sobolev_norm(sigma),
                    phi_x.sobolev_norm(2.0) * phi_x.sobolev_norm(sigma),
                )
            }
        };
        Ok(guarded_ratio(num, den))
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A seeded ensemble of field pairs on one grid. Trial `i` draws `v` then
/// `f` from `SplitMix64::for_trial(seed, i)`, so the same seed and band give
/// the same fields on every grid that resolves the band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnsembleSpec {
    pub n_points: usize,
    pub trials: usize,
    pub seed: u64,
    pub band: BandSpec,
}

impl EnsembleSpec {
    pub fn pair(&self, grid: &Grid, index: usize) -> Result<(Spectrum, Spectrum)> {
        let mut rng = SplitMix64::for_trial(self.seed, index as u64);
        let v = self.band.sample(grid, &mut rng)?;
        let f = self.band.sample(grid, &mut rng)?;
        Ok((v, f))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub estimate: Estimate,
    pub sigma: f64,
    pub p: u32,
    pub n_points: usize,
    pub trials: usize,
    pub max_ratio: f64,
    pub mean_ratio: f64,
}

impl EstimateRow {
    pub const CSV_HEADER: &'static str = "estimate,sigma,p,n_points,trials,max_ratio,mean_ratio";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.10e},{:.10e}",
            self.estimate, self.sigma, self.p, self.n_points, self.trials, self.max_ratio, self.mean_ratio
        )
    }
}

/// Max and mean ratio of `estimate` over `spec`; trials run in parallel.
/// Members with a vanishing right-hand side are skipped; an ensemble with
/// nothing left is an error.
pub fn estimate_report(spec: &EnsembleSpec, estimate: Estimate, sigma: f64, p: u32) -> Result<EstimateRow> {
    estimate.check_parameters(sigma, p)?;
    let grid = Grid::new(spec.n_points)?;
    let ratios = (0..spec.trials)
        .into_par_iter()
        .map(|i| {
            let (v, f) = spec.pair(&grid, i)?;
            estimate.ratio(&v, &f, sigma, p)
        })
        .collect::<Result<Vec<_>>>()?;
    let stats = RatioStats::collect(ratios)?;
    Ok(EstimateRow {
        estimate,
        sigma,
        p,
        n_points: spec.n_points,
        trials: stats.used,
        max_ratio: stats.max,
        mean_ratio: stats.mean,
    })
}

/// Rows for every `(σ, p)` combination admissible for the commutator
/// estimates, taken from `sigmas × ps`.
pub fn commutator_estimate_report(spec: &EnsembleSpec, sigmas: &[f64], ps: &[u32]) -> Result<Vec<EstimateRow>> {
    let mut rows = Vec::new();
    for estimate in Estimate::ALL.into_iter().filter(|e| *e != Estimate::Quadratic) {
        for &sigma in sigmas {
            for &p in ps {
                if estimate.check_parameters(sigma, p).is_ok() {
                    rows.push(estimate_report(spec, estimate, sigma, p)?);
                }
            }
        }
    }
    Ok(rows)
}

pub fn q_norm_bound_report(spec: &EnsembleSpec, r: f64) -> Result<EstimateRow> {
    estimate_report(spec, Estimate::Quadratic, r, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(32).unwrap()
    }

    fn cos(k: i64) -> Spectrum {
        Spectrum::from_cosines(&grid(), &[(1.0, k, 0.0)]).unwrap()
    }

    #[test]
    fn single_mode_ratios() {
        // Same-sign frequency windows: [H; cos x]∂ₓ cos 2x = 0.
        let r = Estimate::CommutatorSmoothData.ratio(&cos(1), &cos(2), 0.0, 1).unwrap().unwrap();
        assert!(r < 1e-15);
        // [H; cos 2x]∂ₓ cos x = −cos x: √π / (‖2 sin 2x‖ ‖cos x‖_{H¹}).
        let r = Estimate::CommutatorSmoothData.ratio(&cos(2), &cos(1), 0.0, 1).unwrap().unwrap();
        assert!((r - 1.0 / (2.0 * (2.0 * PI).sqrt())).abs() < 1e-14);
    }

    #[test]
    fn quadratic_ratio_of_cosine() {
        // Q[cos x] = 1: ‖1‖_{L²} = √(2π); ‖sin x‖_{H²} = 2√π, ‖sin x‖_{L²} = √π.
        let r = Estimate::Quadratic.ratio(&cos(1), &cos(1), 0.0, 0).unwrap().unwrap();
        assert!((r - (2.0 * PI).sqrt() / (2.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn zero_members_are_skipped() {
        let z = Spectrum::zeros(&grid());
        for e in Estimate::ALL {
            let sigma = if e == Estimate::CommutatorL2 || e == Estimate::CommutatorL2Derivative || e == Estimate::BracketCommutator {
                1.0
            } else {
                0.0
            };
            assert_eq!(e.ratio(&z, &z, sigma, 0).unwrap(), None, "{e}");
        }
        assert!(matches!(RatioStats::collect([None]), Err(Error::DegenerateEnsemble)));
    }

    #[test]
    fn parameter_ranges() {
        assert!(Estimate::CommutatorL2.check_parameters(0.5, 0).is_err());
        assert!(Estimate::BracketCommutator.check_parameters(0.0, 0).is_err());
        assert!(Estimate::CommutatorSmoothData.check_parameters(0.0, 3).is_ok());
    }

    #[test]
    fn report_rows() {
        let spec = EnsembleSpec {
            n_points: 32,
            trials: 20,
            seed: 5,
            band: BandSpec::new(1, 8, 2.0).unwrap(),
        };
        let rows = commutator_estimate_report(&spec, &[0.0, 1.0], &[0, 1]).unwrap();
        // l2 and l2_dx at σ = 1; smooth and rough at 4 combinations each; bracket at r = 1.
        assert_eq!(rows.len(), 2 + 8 + 1);
        assert!(rows.iter().all(|r| r.max_ratio.is_finite() && r.max_ratio >= r.mean_ratio));
        assert!(rows[0].csv_row().starts_with("hilbert_commutator_l2,1,0,32,20,"));
        let again = commutator_estimate_report(&spec, &[0.0, 1.0], &[0, 1]).unwrap();
        assert_eq!(rows, again);
    }
}
