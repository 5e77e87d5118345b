//! Time integration of `φ_tt = (μ − 2φ̃_x)φ_xx − Q[φ]`, the first-order model
//! `φ_t = −½H[φ̃²]_xx − φ̃ φ_xx`, and the linearization `φ_tt = μ φ_xx`.

use std::fmt;
use std::str::FromStr;

use crate::diagnostics::{energy, EnergyReport};
use crate::error::{Error, Result};
use crate::initial::InitialDataSpec;
use crate::quadratic::{q_commutator_spectrum, transport_term};
use crate::spectral::{product, Grid, PeriodicField, ProductRule, Spectrum};

/// Energy index reported in time series.
pub const REPORTED_ENERGY_INDEX: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    SecondOrder,
    FirstOrder,
    Linearized,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "second" | "second_order" => Ok(Mode::SecondOrder),
            "first" | "first_order" => Ok(Mode::FirstOrder),
            "linear" | "linearized" => Ok(Mode::Linearized),
            other => Err(Error::InvalidParameter(format!(
                "unknown mode `{other}` (expected second_order, first_order or linearized)"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::SecondOrder => "second_order",
            Mode::FirstOrder => "first_order",
            Mode::Linearized => "linearized",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub t: f64,
    pub phi: PeriodicField,
    pub phi_t: PeriodicField,
}

impl SolverState {
    pub fn new(t: f64, phi: PeriodicField, phi_t: PeriodicField) -> Result<Self> {
        phi.grid().ensure_same(phi_t.grid())?;
        Ok(Self { t, phi, phi_t })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self {
            t: 0.0,
            phi: PeriodicField::zeros(grid),
            phi_t: PeriodicField::zeros(grid),
        }
    }

    pub fn grid(&self) -> &Grid {
        self.phi.grid()
    }

    /// `(φ, φ_t) -> (φ, −φ_t)` at the same time.
    pub fn reversed(&self) -> Self {
        let phi_t = PeriodicField::from_spectrum(self.phi_t.spectrum().scaled(-1.0))
            .expect("negation keeps the spectrum Hermitian");
        Self {
            t: self.t,
            phi: self.phi.clone(),
            phi_t,
        }
    }

    pub fn is_finite(&self) -> bool {
        let finite = |s: &Spectrum| s.coeffs().iter().all(|c| c.re.is_finite() && c.im.is_finite());
        finite(self.phi.spectrum()) && finite(self.phi_t.spectrum())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    /// `min_x (μ − 2φ̃_x)` over grid nodes.
    pub margin: f64,
    pub margin_location: usize,
    /// `margin < δ`.
    pub violated: bool,
    /// `margin < 0`: the linearized operator is elliptic there.
    pub ill_posed: bool,
}

pub fn stability_report(phi: &PeriodicField, mu: f64, delta: f64) -> StabilityReport {
    let slope = PeriodicField::from_spectrum(phi.spectrum().hilbert().derivative(1))
        .expect("Hermitian symbol keeps the spectrum Hermitian");
    let (location, max_slope) = slope
        .samples()
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc });
    let margin = mu - 2.0 * max_slope;
    StabilityReport {
        margin,
        margin_location: location,
        violated: margin < delta,
        ill_posed: margin < 0.0,
    }
}

/// Right-hand sides on a fixed grid with a fixed product rule.
#[derive(Debug, Clone)]
pub struct Dynamics {
    pub mu: f64,
    pub mode: Mode,
    pub rule: ProductRule,
}

impl Dynamics {
    pub fn new(mu: f64, mode: Mode, rule: ProductRule) -> Self {
        Self { mu, mode, rule }
    }

    /// `(μ − 2φ̃_x)φ_xx − Q[φ]`; in linearized mode only `μ φ_xx`.
    pub fn acceleration(&self, phi: &Spectrum) -> Result<Spectrum> {
        let mut acc = phi.derivative(2).scaled(self.mu);
        if self.mode != Mode::Linearized {
            acc.axpy(1.0, &transport_term(phi, self.rule)?)?;
            acc.axpy(-1.0, &q_commutator_spectrum(phi, self.rule)?)?;
        }
        Ok(acc)
    }

    /// `−½H[φ̃²]_xx − φ̃ φ_xx`.
    pub fn first_order_rhs(&self, phi: &Spectrum) -> Result<Spectrum> {
        let ht = phi.hilbert();
        let mut rhs = product(&ht, &ht, self.rule)?.hilbert().derivative(2).scaled(-0.5);
        rhs.axpy(-1.0, &product(&ht, &phi.derivative(2), self.rule)?)?;
        Ok(rhs)
    }

    /// One classical four-stage Runge–Kutta step; means are reset to zero
    /// afterwards.
    pub fn step(&self, state: &SolverState, dt: f64) -> Result<SolverState> {
        let phi = state.phi.spectrum();
        let (phi, phi_t) = match self.mode {
            Mode::FirstOrder => {
                let f = |p: &Spectrum| self.first_order_rhs(p);
                let k1 = f(phi)?;
                let k2 = f(&shifted(phi, 0.5 * dt, &k1)?)?;
                let k3 = f(&shifted(phi, 0.5 * dt, &k2)?)?;
                let k4 = f(&shifted(phi, dt, &k3)?)?;
                let next = combine(phi, dt, [&k1, &k2, &k3, &k4])?.without_mean();
                let rate = self.first_order_rhs(&next)?.without_mean();
                (next, rate)
            }
            Mode::SecondOrder | Mode::Linearized => {
                let v = state.phi_t.spectrum();
                let a = |p: &Spectrum| self.acceleration(p);
                let (p1, v1) = (phi.clone(), v.clone());
                let a1 = a(&p1)?;
                let p2 = shifted(phi, 0.5 * dt, &v1)?;
                let v2 = shifted(v, 0.5 * dt, &a1)?;
                let a2 = a(&p2)?;
                let p3 = shifted(phi, 0.5 * dt, &v2)?;
                let v3 = shifted(v, 0.5 * dt, &a2)?;
                let a3 = a(&p3)?;
                let p4 = shifted(phi, dt, &v3)?;
                let v4 = shifted(v, dt, &a3)?;
                let a4 = a(&p4)?;
                let next_phi = combine(phi, dt, [&v1, &v2, &v3, &v4])?.without_mean();
                let next_v = combine(v, dt, [&a1, &a2, &a3, &a4])?.without_mean();
                (next_phi, next_v)
            }
        };
        let next = SolverState {
            t: state.t + dt,
            phi: field_unchecked(phi),
            phi_t: field_unchecked(phi_t),
        };
        Ok(next)
    }

    /// Initial rate `φ_t(0)` implied by the mode: the given `φ⁽¹⁾` for the
    /// second-order equations, the right-hand side for the first-order model.
    pub fn initial_state(&self, phi0: PeriodicField, phi1: PeriodicField) -> Result<SolverState> {
        match self.mode {
            Mode::FirstOrder => {
                let rate = self.first_order_rhs(phi0.spectrum())?.without_mean();
                SolverState::new(0.0, phi0, field_unchecked(rate))
            }
            _ => SolverState::new(0.0, phi0, phi1),
        }
    }
}

fn shifted(base: &Spectrum, h: f64, slope: &Spectrum) -> Result<Spectrum> {
    let mut out = base.clone();
    out.axpy(h, slope)?;
    Ok(out)
}

fn combine(base: &Spectrum, dt: f64, k: [&Spectrum; 4]) -> Result<Spectrum> {
    let mut out = base.clone();
    out.axpy(dt / 6.0, k[0])?;
    out.axpy(dt / 3.0, k[1])?;
    out.axpy(dt / 3.0, k[2])?;
    out.axpy(dt / 6.0, k[3])?;
    Ok(out)
}

/// Every operator used by the integrator maps Hermitian spectra to Hermitian
/// spectra exactly; non-finite values are left for the caller to detect.
fn field_unchecked(spectrum: Spectrum) -> PeriodicField {
    PeriodicField::from_spectrum_unchecked(spectrum)
}

/// Default step `0.5 / (K √(|μ| + 2‖φ̃⁽⁰⁾_x‖_∞))`.
pub fn default_dt(phi0: &PeriodicField, mu: f64) -> f64 {
    let slope = phi0.spectrum().hilbert().derivative(1);
    let sup = PeriodicField::from_spectrum(slope).map(|f| f.max_abs()).unwrap_or(0.0);
    let speed = (mu.abs() + 2.0 * sup).sqrt().max(f64::MIN_POSITIVE);
    0.5 / (phi0.grid().max_mode() as f64 * speed)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mu: f64,
    pub delta: f64,
    pub n_points: usize,
    /// Requested step; `None` selects [`default_dt`].
    pub dt: Option<f64>,
    pub t_end: f64,
    pub dealias_fraction: f64,
    pub mode: Mode,
    /// Halt once `‖φ‖_{H³}` exceeds this multiple of its initial value.
    pub blowup_threshold: f64,
    /// Require `μ − 2H[φ⁽⁰⁾]_x >= δ` before starting.
    pub enforce_stability: bool,
    /// Halt at the first step where the margin drops below `δ`.
    pub halt_on_violation: bool,
    /// Write a snapshot every this many steps (0: never).
    pub snapshot_every: usize,
    pub initial_data: InitialDataSpec,
}

impl RunConfig {
    pub fn new(mu: f64, delta: f64, n_points: usize, t_end: f64, initial_data: InitialDataSpec) -> Self {
        Self {
            mu,
            delta,
            n_points,
            dt: None,
            t_end,
            dealias_fraction: 2.0 / 3.0,
            mode: Mode::SecondOrder,
            blowup_threshold: 1e6,
            enforce_stability: false,
            halt_on_violation: false,
            snapshot_every: 0,
            initial_data,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !self.mu.is_finite() {
            return bad(format!("mu = {} is not finite", self.mu));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return bad(format!("dt = {dt} must be positive"));
            }
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end = {} must be nonnegative", self.t_end));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return bad(format!("dealias = {} must lie in (0, 1]", self.dealias_fraction));
        }
        if !(self.blowup_threshold > 0.0) {
            return bad(format!("blowup_threshold = {} must be positive", self.blowup_threshold));
        }
        if self.enforce_stability && self.mode == Mode::SecondOrder && !(0.0 < self.delta && self.delta < self.mu) {
            return bad(format!("delta = {} must satisfy 0 < delta < mu = {}", self.delta, self.mu));
        }
        Grid::new(self.n_points).map(|_| ())
    }
}

/// Something that stopped a run before `t_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Halt {
    Blowup { t: f64, h3_norm: f64 },
    NonFinite { t: f64 },
    MarginViolation { t: f64, margin: f64 },
}

/// Transitions of the stability margin and terminal conditions, with times.
#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    MarginViolated { t: f64, margin: f64, location: usize },
    MarginRestored { t: f64, margin: f64 },
    IllPosed { t: f64, margin: f64, location: usize },
    WellPosed { t: f64, margin: f64 },
    Halted(Halt),
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::MarginViolated { t, margin, location } => {
                write!(f, "t={t:.6}: margin {margin:.6e} below delta at node {location}")
            }
            Event::MarginRestored { t, margin } => write!(f, "t={t:.6}: margin restored to {margin:.6e}"),
            Event::IllPosed { t, margin, location } => {
                write!(f, "t={t:.6}: margin {margin:.6e} negative at node {location} (locally elliptic)")
            }
            Event::WellPosed { t, margin } => write!(f, "t={t:.6}: margin positive again ({margin:.6e})"),
            Event::Halted(Halt::Blowup { t, h3_norm }) => write!(f, "t={t:.6}: blowup, H3 norm {h3_norm:.6e}"),
            Event::Halted(Halt::NonFinite { t }) => write!(f, "t={t:.6}: non-finite values"),
            Event::Halted(Halt::MarginViolation { t, margin }) => {
                write!(f, "t={t:.6}: halted on margin violation ({margin:.6e})")
            }
        }
    }
}

/// Per-step diagnostics handed to the run observer.
#[derive(Debug, Clone)]
pub struct StepRecord<'a> {
    pub step: usize,
    pub state: &'a SolverState,
    pub stability: StabilityReport,
    pub energy: EnergyReport,
    pub h3_norm: f64,
    pub q_l2: f64,
    /// `|k = 0 coefficient|` of the acceleration (of the rate, in first-order
    /// mode) before the mean is reset.
    pub zero_mode_defect: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub final_state: SolverState,
    pub dt: f64,
    pub steps: usize,
    pub halted: Option<Halt>,
    pub events: Vec<Event>,
}

/// Fixed step count and step size reaching `t_end` exactly without exceeding
/// the requested step.
pub fn step_plan(t_end: f64, dt: f64) -> (usize, f64) {
    if t_end == 0.0 {
        return (0, dt);
    }
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    (steps, t_end / steps as f64)
}

/// Integrates from `(φ⁽⁰⁾, φ⁽¹⁾)` to `config.t_end`, calling `observer` on
/// the initial state and after every step.
pub fn run(
    config: &RunConfig,
    phi0: PeriodicField,
    phi1: PeriodicField,
    mut observer: impl FnMut(&StepRecord<'_>) -> Result<()>,
) -> Result<RunOutcome> {
    config.validate()?;
    let grid = phi0.grid().clone();
    if grid.n_points() != config.n_points {
        return Err(Error::GridMismatch {
            left: config.n_points,
            right: grid.n_points(),
        });
    }
    for (name, f) in [("phi0", &phi0), ("phi1", &phi1)] {
        if f.mean().abs() > 1e-12 * f.spectrum().max_abs().max(1.0) {
            return Err(Error::InvalidParameter(format!("{name} must have zero mean, mean is {:e}", f.mean())));
        }
    }
    let initial_margin = stability_report(&phi0, config.mu, config.delta);
    if config.enforce_stability && config.mode == Mode::SecondOrder && initial_margin.violated {
        return Err(Error::InvalidParameter(format!(
            "initial stability margin {:.6e} below delta = {}",
            initial_margin.margin, config.delta
        )));
    }

    let dynamics = Dynamics::new(config.mu, config.mode, ProductRule::for_fraction(&grid, config.dealias_fraction));
    let (steps, dt) = step_plan(config.t_end, config.dt.unwrap_or_else(|| default_dt(&phi0, config.mu)));
    let mut state = dynamics.initial_state(phi0, phi1)?;
    let h3_initial = state.phi.sobolev_norm(3.0);
    let blowup_level = config.blowup_threshold * h3_initial;

    let mut events = Vec::new();
    let mut prev = None;
    let report = |state: &SolverState| -> Result<(StabilityReport, f64, f64, f64, EnergyReport)> {
        let stability = stability_report(&state.phi, config.mu, config.delta);
        let q = q_commutator_spectrum(state.phi.spectrum(), dynamics.rule)?;
        let zero_mode = match config.mode {
            Mode::FirstOrder => dynamics.first_order_rhs(state.phi.spectrum())?.get(0).norm(),
            _ => dynamics.acceleration(state.phi.spectrum())?.get(0).norm(),
        };
        let e = energy(state, config.mu, REPORTED_ENERGY_INDEX);
        Ok((stability, state.phi.sobolev_norm(3.0), q.sobolev_norm(0.0), zero_mode, e))
    };

    let mut halted = None;
    let mut done = 0;
    for step in 0..=steps {
        let (stability, h3, q_l2, zero_mode, e) = report(&state)?;
        track_events(&mut events, prev, &stability, state.t);
        prev = Some(stability);
        observer(&StepRecord {
            step,
            state: &state,
            stability,
            energy: e,
            h3_norm: h3,
            q_l2,
            zero_mode_defect: zero_mode,
        })?;
        if config.halt_on_violation && stability.violated {
            halted = Some(Halt::MarginViolation {
                t: state.t,
                margin: stability.margin,
            });
            break;
        }
        if h3_initial > 0.0 && h3 > blowup_level {
            halted = Some(Halt::Blowup { t: state.t, h3_norm: h3 });
            break;
        }
        if step == steps {
            break;
        }
        let mut next = dynamics.step(&state, dt)?;
        next.t = (step + 1) as f64 * dt;
        if !next.is_finite() {
            halted = Some(Halt::NonFinite { t: next.t });
            break;
        }
        state = next;
        done = step + 1;
    }
    if let Some(h) = &halted {
        events.push(Event::Halted(*h));
    }
    Ok(RunOutcome {
        final_state: state,
        dt,
        steps: done,
        halted,
        events,
    })
}

fn track_events(events: &mut Vec<Event>, prev: Option<StabilityReport>, now: &StabilityReport, t: f64) {
    let (was_violated, was_ill) = prev.map_or((false, false), |p| (p.violated, p.ill_posed));
    if now.violated && !was_violated {
        events.push(Event::MarginViolated {
            t,
            margin: now.margin,
            location: now.margin_location,
        });
    } else if !now.violated && was_violated {
        events.push(Event::MarginRestored { t, margin: now.margin });
    }
    if now.ill_posed && !was_ill {
        events.push(Event::IllPosed {
            t,
            margin: now.margin,
            location: now.margin_location,
        });
    } else if !now.ill_posed && was_ill {
        events.push(Event::WellPosed { t, margin: now.margin });
    }
}

/// `‖φ⁽⁰⁾_x‖²_{H²} + ‖φ⁽¹⁾‖²_{H²}`.
pub fn data_size_squared(phi0: &PeriodicField, phi1: &PeriodicField) -> f64 {
    phi0.spectrum().derivative(1).sobolev_norm(2.0).powi(2) + phi1.sobolev_norm(2.0).powi(2)
}

/// `C₁ (a² + b²)^{−1/2}` for data norms `a = ‖φ⁽⁰⁾_x‖_{H²}`, `b = ‖φ⁽¹⁾‖_{H²}`;
/// `+∞` for zero data.
pub fn t0_from_norms(a: f64, b: f64, c1: f64) -> f64 {
    let size = a.hypot(b);
    if size == 0.0 {
        f64::INFINITY
    } else {
        c1 / size
    }
}

/// Lifespan lower bound `C₁ (‖φ⁽⁰⁾_x‖²_{H²} + ‖φ⁽¹⁾‖²_{H²})^{−1/2}`.
pub fn t0_estimate(phi0: &PeriodicField, phi1: &PeriodicField, c1: f64) -> Result<f64> {
    if !(c1 > 0.0) {
        return Err(Error::InvalidParameter(format!("C1 = {c1} must be positive")));
    }
    let size = data_size_squared(phi0, phi1);
    Ok(if size == 0.0 { f64::INFINITY } else { c1 / size.sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallnessReport {
    /// `‖H[φ⁽⁰⁾]_x‖_∞` over grid nodes.
    pub sup_norm: f64,
    /// `(μ − δ)/2`.
    pub threshold: f64,
    pub passed: bool,
    /// Actual `min (μ − 2H[φ⁽⁰⁾]_x)`.
    pub margin: f64,
}

/// Sufficient condition `‖H[φ⁽⁰⁾]_x‖_∞ <= (μ − δ)/2` for margin `>= δ`.
pub fn smallness_check(phi0: &PeriodicField, mu: f64, delta: f64) -> Result<SmallnessReport> {
    if !(0.0 < delta && delta < mu) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} must satisfy 0 < delta < mu = {mu}"
        )));
    }
    let slope = PeriodicField::from_spectrum(phi0.spectrum().hilbert().derivative(1))?;
    let sup_norm = slope.max_abs();
    let threshold = 0.5 * (mu - delta);
    Ok(SmallnessReport {
        sup_norm,
        threshold,
        passed: sup_norm <= threshold,
        margin: stability_report(phi0, mu, delta).margin,
    })
}
