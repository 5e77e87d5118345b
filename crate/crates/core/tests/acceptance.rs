//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use sheetwave_core::checks::{identity_suite, kernel_violations, CheckOutcome, SuiteConfig};
use sheetwave_core::diagnostics::{energy, riccati_check, TrajectorySample};
use sheetwave_core::ensemble::BandSpec;
use sheetwave_core::estimates::{commutator_estimate_report, q_norm_bound_report, EnsembleSpec, EstimateRow};
use sheetwave_core::evolution::{default_dt, run, Dynamics, Mode, RunConfig, SolverState, REPORTED_ENERGY_INDEX};
use sheetwave_core::initial::{materialize, InitialDataSpec, InitialShape, Velocity};
use sheetwave_core::spectral::{Grid, PeriodicField, ProductRule, Spectrum};
use sheetwave_core::Result;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Result<Verdict> {
    Ok(Verdict { pass, detail })
}

fn outcome<'a>(suite: &'a [CheckOutcome], name: &str) -> &'a CheckOutcome {
    suite.iter().find(|o| o.name == name).expect("identity present in suite")
}

fn spectral_distance(a: &SolverState, b: &SolverState) -> f64 {
    let dp = a.phi.spectrum().minus(b.phi.spectrum()).unwrap().sobolev_norm(0.0);
    let dv = a.phi_t.spectrum().minus(b.phi_t.spectrum()).unwrap().sobolev_norm(0.0);
    dp.hypot(dv)
}

fn state_norm(s: &SolverState) -> f64 {
    s.phi.sobolev_norm(0.0).hypot(s.phi_t.sobolev_norm(0.0))
}

/// Integrates with `run` and returns every state, including the initial one.
fn trajectory(config: &RunConfig, phi0: PeriodicField, phi1: PeriodicField) -> Result<(Vec<SolverState>, f64)> {
    let mut states = Vec::new();
    let outcome = run(config, phi0, phi1, |r| {
        states.push(r.state.clone());
        Ok(())
    })?;
    Ok((states, outcome.dt))
}

fn config(mu: f64, n: usize, t_end: f64, dt: Option<f64>) -> RunConfig {
    let mut c = RunConfig::new(mu, 0.5 * mu.abs(), n, t_end, InitialDataSpec::single_mode(0.0, 1, 0.0));
    c.dt = dt;
    c.enforce_stability = false;
    c
}

fn suite() -> Result<(Vec<CheckOutcome>, f64)> {
    let start = Instant::now();
    let s = identity_suite(&SuiteConfig::default())?;
    Ok((s, start.elapsed().as_secs_f64()))
}

fn three_way(suite: &[CheckOutcome], secs: f64) -> Result<Verdict> {
    let o = outcome(suite, "Q three-way equivalence");
    verdict(
        o.worst <= 1e-10 && o.cases == 200 && secs < 30.0,
        format!("worst relative deviation {:.2e} over {} fields (suite {secs:.1}s)", o.worst, o.cases),
    )
}

fn closed_form(suite: &[CheckOutcome]) -> Result<Verdict> {
    let o = outcome(suite, "Q[a cos kx] = a^2 k^3");
    verdict(o.worst <= 1e-12, format!("worst deviation per unit a^2k^3 {:.2e}", o.worst))
}

fn kernel() -> Result<Verdict> {
    let start = Instant::now();
    let bad = kernel_violations(512)?;
    let secs = start.elapsed().as_secs_f64();
    verdict(bad == 0 && secs < 10.0, format!("{bad} violations over 1025^2 pairs in {secs:.2}s"))
}

fn hilbert_suite(suite: &[CheckOutcome]) -> Result<Verdict> {
    let names = [
        "H^2 f = -(f - mean)",
        "product identity",
        "Hilbert adjoint",
        "commutator self-adjointness",
    ];
    let worst = names.iter().map(|n| outcome(suite, n).worst).fold(0.0, f64::max);
    let cases = names.iter().map(|n| outcome(suite, n).cases).min().unwrap();
    verdict(worst <= 1e-10 && cases >= 500, format!("worst residual {worst:.2e}, {cases} pairs each"))
}

fn zero_mode(suite: &[CheckOutcome]) -> Result<Verdict> {
    let o = outcome(suite, "zero-mode cancellation");
    verdict(o.worst <= 1e-12 && o.cases >= 500, format!("worst |k=0| {:.2e} over {} fields", o.worst, o.cases))
}

/// Root of the cubic Hermite interpolant on `[t0, t1]`, by bisection.
fn hermite_root(t0: f64, t1: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> f64 {
    let h = t1 - t0;
    let p = |s: f64| {
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * d0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * h * d1
    };
    let (mut a, mut b) = (0.0, 1.0);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if (p(a) <= 0.0) == (p(m) <= 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    t0 + 0.5 * (a + b) * h
}

fn measured_frequency(states: &[SolverState], k: i64) -> f64 {
    let mut crossings = Vec::new();
    for w in states.windows(2) {
        let (y0, y1) = (w[0].phi.spectrum().get(k).re, w[1].phi.spectrum().get(k).re);
        if y0 != 0.0 && (y0 < 0.0) != (y1 < 0.0) {
            let (d0, d1) = (w[0].phi_t.spectrum().get(k).re, w[1].phi_t.spectrum().get(k).re);
            crossings.push(hermite_root(w[0].t, w[1].t, y0, y1, d0, d1));
        }
    }
    let half_periods = (crossings.len() - 1) as f64;
    std::f64::consts::PI * half_periods / (crossings[crossings.len() - 1] - crossings[0])
}

fn dispersion_and_growth() -> Result<Verdict> {
    let n = 64;
    let grid = Grid::new(n)?;
    let mut worst_freq = 0.0f64;
    for k in [1i64, 2, 3, 5] {
        let omega = k as f64;
        let period = 2.0 * std::f64::consts::PI / omega;
        let c = config(1.0, n, 10.0 * period + 0.25 * period, Some(period / 200.0));
        let phi0 = PeriodicField::from_spectrum(Spectrum::from_cosines(&grid, &[(1e-4, k, 0.0)])?)?;
        let (states, _) = trajectory(&c, phi0, PeriodicField::zeros(&grid))?;
        let measured = measured_frequency(&states, k);
        worst_freq = worst_freq.max((measured - omega).abs() / omega);
    }
    let mut worst_rate = 0.0f64;
    for k in [1i64, 2, 4] {
        let rate = k as f64;
        let mut c = config(-1.0, n, 3.0 / rate, Some(0.002 / rate));
        c.initial_data = InitialDataSpec::single_mode(1e-8, k, 0.0).with_velocity(Velocity::Growing);
        let data = materialize(&c.initial_data, &grid, -1.0)?;
        let (states, _) = trajectory(&c, data.phi0, data.phi1)?;
        let (first, last) = (&states[0], &states[states.len() - 1]);
        let measured = (last.phi.spectrum().get(k).norm() / first.phi.spectrum().get(k).norm()).ln() / last.t;
        worst_rate = worst_rate.max((measured - rate).abs() / rate);
    }
    verdict(
        worst_freq <= 1e-6 && worst_rate <= 0.05,
        format!("frequency rel. error {worst_freq:.2e} (10 periods), growth rate rel. error {worst_rate:.2e} (3 e-folds)"),
    )
}

fn integrator_order() -> Result<Verdict> {
    let n = 32;
    let grid = Grid::new(n)?;
    let phi0 = PeriodicField::from_spectrum(Spectrum::from_cosines(
        &grid,
        &[(0.2, 1, 0.0), (0.1, 2, -0.5 * std::f64::consts::PI)],
    )?)?;
    let phi1 = PeriodicField::from_spectrum(Spectrum::from_cosines(&grid, &[(0.05, 3, 0.4)])?)?;
    let dt = 0.04;
    let finals: Vec<SolverState> = [dt, dt / 2.0, dt / 4.0]
        .iter()
        .map(|&h| {
            let (states, _) = trajectory(&config(1.0, n, 1.0, Some(h)), phi0.clone(), phi1.clone())?;
            Ok(states.last().unwrap().clone())
        })
        .collect::<Result<_>>()?;
    let e1 = spectral_distance(&finals[0], &finals[1]);
    let e2 = spectral_distance(&finals[1], &finals[2]);
    let order = (e1 / e2).log2();
    verdict((order - 4.0).abs() <= 0.2, format!("observed order {order:.3} (differences {e1:.2e}, {e2:.2e})"))
}

fn riccati_fit(eps: f64) -> Result<(f64, bool, Option<String>, usize)> {
    let n = 64;
    let grid = Grid::new(n)?;
    let mut c = config(1.0, n, 3.0, None);
    c.delta = 0.5;
    let phi0 = PeriodicField::from_spectrum(Spectrum::from_cosines(&grid, &[(eps, 1, 0.0), (0.5 * eps, 2, 0.3)])?)?;
    let (states, _) = trajectory(&c, phi0, PeriodicField::zeros(&grid))?;
    let samples: Vec<TrajectorySample> = states
        .iter()
        .map(|s| TrajectorySample::from(&energy(s, 1.0, REPORTED_ENERGY_INDEX)))
        .collect();
    let report = riccati_check(&samples, c.delta)?;
    Ok((report.c_hat, report.holds(), report.skipped, samples.len()))
}

fn riccati() -> Result<Verdict> {
    let (c_big, ok_big, skip_big, n_big) = riccati_fit(0.1)?;
    let (c_small, ok_small, skip_small, n_small) = riccati_fit(0.05)?;
    let ratio = c_small / c_big;
    let stable = skip_big.is_none() && skip_small.is_none();
    verdict(
        stable && ok_big && ok_small && c_big > 0.0 && ratio <= 0.6,
        format!(
            "C(0.1) = {c_big:.3e}, C(0.05) = {c_small:.3e}, ratio {ratio:.3}, bound holds {ok_big}/{ok_small}, \
             samples {n_big}/{n_small}, margin >= delta {stable}"
        ),
    )
}

fn ratio_row_pairs(band_small: (i64, i64), band_large: (i64, i64)) -> Result<Vec<(EstimateRow, EstimateRow)>> {
    let values = [0.0, 1.0, 2.0, 3.0];
    let ps = [0u32, 1, 2, 3];
    let rows = |n: usize, band: (i64, i64)| -> Result<Vec<EstimateRow>> {
        let spec = EnsembleSpec {
            n_points: n,
            trials: 500,
            seed: 11,
            band: BandSpec::new(band.0, band.1, 2.0)?,
        };
        let mut rows = commutator_estimate_report(&spec, &values, &ps)?;
        for r in values {
            rows.push(q_norm_bound_report(&spec, r)?);
        }
        Ok(rows)
    };
    Ok(rows(128, band_small)?.into_iter().zip(rows(256, band_large)?).collect())
}

fn ratio_stability() -> Result<Verdict> {
    let fixed = ratio_row_pairs((1, 16), (1, 16))?;
    let worst_fixed = fixed
        .iter()
        .map(|(a, b)| (b.max_ratio - a.max_ratio).abs() / a.max_ratio)
        .fold(0.0, f64::max);
    let scaled = ratio_row_pairs((1, 16), (1, 32))?;
    let worst_growth = scaled.iter().map(|(a, b)| b.max_ratio / a.max_ratio).fold(0.0, f64::max);
    verdict(
        worst_fixed <= 0.1 && worst_growth <= 1.1,
        format!(
            "{} estimate rows; fixed ensemble max change {worst_fixed:.2e}, band-scaled worst growth x{worst_growth:.3}",
            fixed.len()
        ),
    )
}

fn time_to_double(eps: f64, dt: f64) -> Result<f64> {
    let n = 64;
    let grid = Grid::new(n)?;
    let dynamics = Dynamics::new(1.0, Mode::SecondOrder, ProductRule::TwoThirds);
    let phi0 = PeriodicField::from_spectrum(Spectrum::from_cosines(&grid, &[(eps, 1, 0.0)])?)?;
    let mut state = dynamics.initial_state(phi0, PeriodicField::zeros(&grid))?;
    let y0 = energy(&state, 1.0, REPORTED_ENERGY_INDEX).y;
    let mut prev = (0.0, y0);
    for step in 1..=2_000_000usize {
        state = dynamics.step(&state, dt)?;
        state.t = step as f64 * dt;
        let y = energy(&state, 1.0, REPORTED_ENERGY_INDEX).y;
        if !y.is_finite() {
            break;
        }
        if y >= 2.0 * y0 {
            return Ok(prev.0 + (2.0 * y0 - prev.1) / (y - prev.1) * (state.t - prev.0));
        }
        prev = (state.t, y);
    }
    Err(sheetwave_core::Error::InvalidParameter(format!("no doubling for eps = {eps}")))
}

fn lifespan_scaling() -> Result<Verdict> {
    let grid = Grid::new(64)?;
    let big = PeriodicField::from_spectrum(Spectrum::from_cosines(&grid, &[(0.2, 1, 0.0)])?)?;
    let dt = default_dt(&big, 1.0);
    let t_big = time_to_double(0.2, dt)?;
    let t_small = time_to_double(0.1, dt)?;
    let ratio = t_small / t_big;
    verdict(
        (ratio - 2.0).abs() <= 0.3,
        format!("time to double energy norm: {t_big:.4} (eps 0.2), {t_small:.4} (eps 0.1), ratio {ratio:.3}"),
    )
}

fn time_reversal() -> Result<Verdict> {
    let n = 64;
    let grid = Grid::new(n)?;
    let spec = InitialDataSpec {
        shape: InitialShape::MultiMode {
            terms: vec![(0.1, 1, 0.0), (0.05, 2, 1.0), (0.02, 3, -0.4)],
        },
        velocity: Velocity::Traveling,
    };
    let data = materialize(&spec, &grid, 1.0)?;
    let c = config(1.0, n, 0.5, None);
    let start = SolverState::new(0.0, data.phi0.clone(), data.phi1.clone())?;
    let (forward, _) = trajectory(&c, data.phi0, data.phi1)?;
    let flipped = forward.last().unwrap().reversed();
    let (back, _) = trajectory(&c, flipped.phi, flipped.phi_t)?;
    let returned = back.last().unwrap().reversed();
    let rel = spectral_distance(&returned, &start) / state_norm(&start);
    verdict(rel <= 1e-6, format!("relative return error {rel:.2e} after T = 0.5 forward and back"))
}

fn main() -> ExitCode {
    let started = Instant::now();
    let shared = suite();
    let mut failures = 0;
    let mut report = |id: usize, name: &str, v: Result<Verdict>| {
        let (pass, detail) = match v {
            Ok(v) => (v.pass, v.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!pass);
        println!("criterion {id:>2} {:<30} {}  {detail}", name, if pass { "PASS" } else { "FAIL" });
    };
    match &shared {
        Ok((s, secs)) => {
            report(1, "operator three-way equivalence", three_way(s, *secs));
            report(2, "closed-form Q values", closed_form(s));
        }
        Err(e) => {
            report(1, "operator three-way equivalence", Err(sheetwave_core::Error::InvalidParameter(e.to_string())));
            report(2, "closed-form Q values", Err(sheetwave_core::Error::InvalidParameter(e.to_string())));
        }
    }
    report(3, "kernel exactness", kernel());
    match &shared {
        Ok((s, _)) => {
            report(4, "Hilbert identity suite", hilbert_suite(s));
            report(5, "zero-mode cancellation", zero_mode(s));
        }
        Err(e) => {
            report(4, "Hilbert identity suite", Err(sheetwave_core::Error::InvalidParameter(e.to_string())));
            report(5, "zero-mode cancellation", Err(sheetwave_core::Error::InvalidParameter(e.to_string())));
        }
    }
    report(6, "linear dispersion and growth", dispersion_and_growth());
    report(7, "integrator order", integrator_order());
    report(8, "Riccati energy bound", riccati());
    report(9, "estimate ratio stability", ratio_stability());
    report(10, "lifespan scaling", lifespan_scaling());
    report(11, "time reversal", time_reversal());
    println!(
        "acceptance: {} of 11 criteria passed in {:.1}s",
        11 - failures,
        started.elapsed().as_secs_f64()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
