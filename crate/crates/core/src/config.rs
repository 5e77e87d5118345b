//! `key = value` run configuration.
//!
//! ```text
//! # comment
//! mu = 1.0
//! delta = 0.5
//! n_points = 128
//! dt = auto
//! t_end = 2.0
//! initial = single_mode
//! amplitude = 0.01
//! wavenumber = 1
//! ```

use std::collections::HashMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::ensemble::BandSpec;
use crate::error::{Error, Result};
use crate::evolution::{Mode, RunConfig};
use crate::initial::{InitialDataSpec, InitialShape, Velocity};

const KNOWN_KEYS: &[&str] = &[
    "mu",
    "delta",
    "n_points",
    "dt",
    "t_end",
    "dealias",
    "mode",
    "blowup_threshold",
    "enforce_stability",
    "halt_on_violation",
    "snapshot_every",
    "initial",
    "amplitude",
    "wavenumber",
    "phase",
    "amplitudes",
    "wavenumbers",
    "phases",
    "seed",
    "band",
    "decay",
    "velocity",
];

struct Entries {
    values: HashMap<String, (usize, String)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self> {
        let mut values: HashMap<String, (usize, String)> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("expected `key = value`, got `{line}`"),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("unknown key `{key}`"),
                });
            }
            if value.is_empty() {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("key `{key}` has no value"),
                });
            }
            if let Some((first, _)) = values.get(key) {
                return Err(Error::Config {
                    line: line_no,
                    message: format!("duplicate key `{key}` (lines {first} and {line_no})"),
                });
            }
            values.insert(key.to_string(), (line_no, value.to_string()));
        }
        Ok(Self { values })
    }

    fn line(&self, key: &str) -> usize {
        self.values.get(key).map_or(0, |v| v.0)
    }

    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.values.get(key)
    }

    fn get<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, value)) => value.parse().map(Some).map_err(|_| Error::Config {
                line: *line,
                message: format!("key `{key}`: expected {what}, got `{value}`"),
            }),
        }
    }

    fn require<T: FromStr>(&self, key: &str, what: &str) -> Result<T> {
        self.get(key, what)?
            .ok_or_else(|| Error::ConfigMissing(format!("missing required key `{key}`")))
    }

    fn list<T: FromStr>(&self, key: &str, what: &str) -> Result<Option<Vec<T>>> {
        let Some((line, value)) = self.raw(key) else {
            return Ok(None);
        };
        value
            .split(',')
            .map(|item| {
                item.trim().parse().map_err(|_| Error::Config {
                    line: *line,
                    message: format!("key `{key}`: expected a list of {what}, got `{value}`"),
                })
            })
            .collect::<Result<Vec<T>>>()
            .map(Some)
    }

    fn constraint(&self, key: &str, message: String) -> Error {
        Error::Config {
            line: self.line(key),
            message: format!("key `{key}`: {message}"),
        }
    }
}

fn parse_bool(v: &str) -> Option<bool> {
    match v {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}

fn parse_fraction(v: &str) -> Option<f64> {
    match v.split_once('/') {
        Some((a, b)) => Some(a.trim().parse::<f64>().ok()? / b.trim().parse::<f64>().ok()?),
        None => v.parse().ok(),
    }
}

/// Parses and validates a run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let e = Entries::parse(text)?;
    let mu: f64 = e.require("mu", "a number")?;
    let delta: f64 = e.require("delta", "a number")?;
    let n_points: usize = e.require("n_points", "a positive even integer")?;
    let initial_data = parse_initial(&e)?;
    let mut config = RunConfig::new(mu, delta, n_points, 1.0, initial_data);

    if let Some((line, v)) = e.raw("dt") {
        config.dt = if v == "auto" {
            None
        } else {
            Some(v.parse().map_err(|_| Error::Config {
                line: *line,
                message: format!("key `dt`: expected `auto` or a number, got `{v}`"),
            })?)
        };
    }
    if let Some(t) = e.get("t_end", "a number")? {
        config.t_end = t;
    }
    if let Some((line, v)) = e.raw("dealias") {
        config.dealias_fraction = parse_fraction(v).ok_or_else(|| Error::Config {
            line: *line,
            message: format!("key `dealias`: expected a fraction such as 2/3, got `{v}`"),
        })?;
    }
    if let Some((line, v)) = e.raw("mode") {
        config.mode = v.parse().map_err(|err: Error| Error::Config {
            line: *line,
            message: format!("key `mode`: {err}"),
        })?;
    }
    if let Some(b) = e.get("blowup_threshold", "a number")? {
        config.blowup_threshold = b;
    }
    config.enforce_stability = true;
    for key in ["enforce_stability", "halt_on_violation"] {
        if let Some((line, v)) = e.raw(key) {
            let b = parse_bool(v).ok_or_else(|| Error::Config {
                line: *line,
                message: format!("key `{key}`: expected true or false, got `{v}`"),
            })?;
            if key == "enforce_stability" {
                config.enforce_stability = b;
            } else {
                config.halt_on_violation = b;
            }
        }
    }
    if let Some(s) = e.get("snapshot_every", "a nonnegative integer")? {
        config.snapshot_every = s;
    }

    if !mu.is_finite() {
        return Err(e.constraint("mu", "must be finite".into()));
    }
    if config.enforce_stability && config.mode == Mode::SecondOrder && !(0.0 < delta && delta < mu) {
        return Err(e.constraint("delta", format!("must satisfy 0 < delta < mu = {mu}, got {delta}")));
    }
    if n_points < 8 || !n_points.is_multiple_of(2) {
        return Err(e.constraint("n_points", format!("must be an even integer >= 8, got {n_points}")));
    }
    if let Some(dt) = config.dt {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(e.constraint("dt", format!("must be positive, got {dt}")));
        }
    }
    if !(config.t_end >= 0.0 && config.t_end.is_finite()) {
        return Err(e.constraint("t_end", format!("must be nonnegative, got {}", config.t_end)));
    }
    if !(config.dealias_fraction > 0.0 && config.dealias_fraction <= 1.0) {
        return Err(e.constraint("dealias", format!("must lie in (0, 1], got {}", config.dealias_fraction)));
    }
    if !(config.blowup_threshold > 0.0) {
        return Err(e.constraint("blowup_threshold", format!("must be positive, got {}", config.blowup_threshold)));
    }
    let k_max = (n_points / 2 - 1) as i64;
    let modes: Vec<(&str, i64)> = match &config.initial_data.shape {
        InitialShape::SingleMode { mode, .. } => vec![("wavenumber", *mode)],
        InitialShape::MultiMode { terms } => terms.iter().map(|t| ("wavenumbers", t.1)).collect(),
        InitialShape::RandomBand { band, .. } => vec![("band", band.band.1)],
    };
    for (key, k) in modes {
        if k < 1 || k >= k_max {
            return Err(e.constraint(key, format!("mode {k} must satisfy 1 <= k < K = {k_max}")));
        }
    }
    config.validate()?;
    Ok(config)
}

fn parse_initial(e: &Entries) -> Result<InitialDataSpec> {
    let kind: String = e.require("initial", "an initial-data kind")?;
    let shape = match kind.as_str() {
        "single_mode" => InitialShape::SingleMode {
            amplitude: e.require("amplitude", "a number")?,
            mode: e.require("wavenumber", "a positive integer")?,
            phase: e.get("phase", "a number")?.unwrap_or(0.0),
        },
        "multi_mode" => {
            let amps: Vec<f64> = e
                .list("amplitudes", "numbers")?
                .ok_or_else(|| Error::ConfigMissing("missing required key `amplitudes`".into()))?;
            let ks: Vec<i64> = e
                .list("wavenumbers", "integers")?
                .ok_or_else(|| Error::ConfigMissing("missing required key `wavenumbers`".into()))?;
            let phases: Vec<f64> = e.list("phases", "numbers")?.unwrap_or_else(|| vec![0.0; amps.len()]);
            if ks.len() != amps.len() || phases.len() != amps.len() {
                return Err(e.constraint(
                    "wavenumbers",
                    format!(
                        "amplitudes, wavenumbers and phases must have equal lengths ({}, {}, {})",
                        amps.len(),
                        ks.len(),
                        phases.len()
                    ),
                ));
            }
            InitialShape::MultiMode {
                terms: amps.into_iter().zip(ks).zip(phases).map(|((a, k), p)| (a, k, p)).collect(),
            }
        }
        "random_band" => {
            let band: Vec<i64> = e
                .list("band", "integers")?
                .ok_or_else(|| Error::ConfigMissing("missing required key `band`".into()))?;
            if band.len() != 2 {
                return Err(e.constraint("band", "expected `k_min, k_max`".into()));
            }
            let decay = e.get("decay", "a number")?.unwrap_or(2.0);
            let spec = BandSpec::new(band[0], band[1], decay).map_err(|err| e.constraint("band", err.to_string()))?;
            InitialShape::RandomBand {
                seed: e.require("seed", "an unsigned 64-bit integer")?,
                band: spec,
                amplitude: e.get("amplitude", "a number")?.unwrap_or(1.0),
            }
        }
        other => {
            return Err(e.constraint(
                "initial",
                format!("unknown kind `{other}` (expected single_mode, multi_mode or random_band)"),
            ))
        }
    };
    let velocity = match e.raw("velocity") {
        None => Velocity::Zero,
        Some((line, v)) => v.parse().map_err(|err: Error| Error::Config {
            line: *line,
            message: format!("key `velocity`: {err}"),
        })?,
    };
    Ok(InitialDataSpec { shape, velocity })
}

/// Renders a configuration that [`parse_config`] reads back unchanged.
pub fn format_config(config: &RunConfig) -> String {
    let mut s = String::new();
    let mut put = |k: &str, v: String| writeln!(s, "{k} = {v}").expect("writing to a String");
    put("mu", config.mu.to_string());
    put("delta", config.delta.to_string());
    put("n_points", config.n_points.to_string());
    put("dt", config.dt.map_or("auto".into(), |d| d.to_string()));
    put("t_end", config.t_end.to_string());
    put("dealias", config.dealias_fraction.to_string());
    put("mode", config.mode.to_string());
    put("blowup_threshold", config.blowup_threshold.to_string());
    put("enforce_stability", config.enforce_stability.to_string());
    put("halt_on_violation", config.halt_on_violation.to_string());
    put("snapshot_every", config.snapshot_every.to_string());
    let join = |xs: Vec<String>| xs.join(", ");
    match &config.initial_data.shape {
        InitialShape::SingleMode { amplitude, mode, phase } => {
            put("initial", "single_mode".into());
            put("amplitude", amplitude.to_string());
            put("wavenumber", mode.to_string());
            put("phase", phase.to_string());
        }
        InitialShape::MultiMode { terms } => {
            put("initial", "multi_mode".into());
            put("amplitudes", join(terms.iter().map(|t| t.0.to_string()).collect()));
            put("wavenumbers", join(terms.iter().map(|t| t.1.to_string()).collect()));
            put("phases", join(terms.iter().map(|t| t.2.to_string()).collect()));
        }
        InitialShape::RandomBand { seed, band, amplitude } => {
            put("initial", "random_band".into());
            put("seed", seed.to_string());
            put("band", format!("{}, {}", band.band.0, band.band.1));
            put("decay", band.decay.to_string());
            put("amplitude", amplitude.to_string());
        }
    }
    put(
        "velocity",
        match config.initial_data.velocity {
            Velocity::Zero => "zero",
            Velocity::Traveling => "traveling",
            Velocity::Growing => "growing",
        }
        .into(),
    );
    s
}
