//! Run directories: time series, spectrum snapshots, event log, and the
//! energy report derived from them.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::{format_config, parse_config};
use crate::diagnostics::{energy, riccati_check, RiccatiReport, TrajectorySample};
use crate::error::{Error, Result};
use crate::evolution::{run, Halt, RunConfig, SolverState, StepRecord, REPORTED_ENERGY_INDEX};
use crate::initial::materialize;
use crate::spectral::{read_snapshot, write_snapshot, Grid, PeriodicField};

pub const TIMESERIES_HEADER: &str = "t,h3_norm,h2_norm_phit,energy_r2,margin_min,q_l2,zero_mode_defect";
pub const ENERGY_REPORT_HEADER: &str = "t,energy,y,margin,riccati_lhs,riccati_rhs,bound_ok";
pub const SNAPSHOT_INDEX_HEADER: &str = "step,t,phi_file,phit_file";

pub const CONFIG_FILE: &str = "config.txt";
pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const SNAPSHOT_INDEX_FILE: &str = "snapshots.csv";
pub const SNAPSHOT_DIR: &str = "snapshots";
pub const EVENTS_FILE: &str = "events.log";
pub const ENERGY_REPORT_FILE: &str = "energy_report.csv";

/// One row of `timeseries.csv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeseriesRow {
    pub t: f64,
    pub h3_norm: f64,
    pub h2_norm_phit: f64,
    pub energy_r2: f64,
    pub margin_min: f64,
    pub q_l2: f64,
    pub zero_mode_defect: f64,
}

impl TimeseriesRow {
    pub fn from_record(r: &StepRecord<'_>) -> Self {
        Self {
            t: r.state.t,
            h3_norm: r.h3_norm,
            h2_norm_phit: r.state.phi_t.sobolev_norm(2.0),
            energy_r2: r.energy.energy,
            margin_min: r.stability.margin,
            q_l2: r.q_l2,
            zero_mode_defect: r.zero_mode_defect,
        }
    }

    fn fields(&self) -> [f64; 7] {
        [
            self.t,
            self.h3_norm,
            self.h2_norm_phit,
            self.energy_r2,
            self.margin_min,
            self.q_l2,
            self.zero_mode_defect,
        ]
    }
}

/// Writes `timeseries.csv`; values use the shortest representation that
/// parses back to the same double.
pub struct TimeseriesWriter<W: Write> {
    out: W,
}

impl<W: Write> TimeseriesWriter<W> {
    pub fn new(mut out: W) -> std::io::Result<Self> {
        writeln!(out, "{TIMESERIES_HEADER}")?;
        Ok(Self { out })
    }

    pub fn write_row(&mut self, row: &TimeseriesRow) -> std::io::Result<()> {
        let cells: Vec<String> = row.fields().iter().map(|v| v.to_string()).collect();
        writeln!(self.out, "{}", cells.join(","))
    }

    pub fn finish(mut self) -> std::io::Result<W> {
        self.out.flush()?;
        Ok(self.out)
    }
}

pub fn read_timeseries(path: &Path) -> Result<Vec<TimeseriesRow>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == TIMESERIES_HEADER => {}
        _ => return Err(err(1, format!("expected header `{TIMESERIES_HEADER}`"))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let v: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| err(i + 1, format!("bad number: {e}")))?;
        if v.len() != 7 {
            return Err(err(i + 1, format!("expected 7 columns, got {}", v.len())));
        }
        rows.push(TimeseriesRow {
            t: v[0],
            h3_norm: v[1],
            h2_norm_phit: v[2],
            energy_r2: v[3],
            margin_min: v[4],
            q_l2: v[5],
            zero_mode_defect: v[6],
        });
    }
    Ok(rows)
}

/// What a finished run left behind.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub directory: PathBuf,
    pub steps: usize,
    pub dt: f64,
    pub final_t: f64,
    pub halted: Option<Halt>,
    pub data_size_squared: f64,
    pub max_h3_norm: f64,
    pub min_margin: f64,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

/// Materializes the initial data, integrates, and writes every output file
/// into `dir` (created if needed).
pub fn run_to_directory(config: &RunConfig, dir: &Path) -> Result<RunSummary> {
    config.validate()?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let grid = Grid::new(config.n_points)?;
    let data = materialize(&config.initial_data, &grid, config.mu)?;
    fs::write(dir.join(CONFIG_FILE), format_config(config)).map_err(|e| Error::io(dir.join(CONFIG_FILE), e))?;

    let ts_path = dir.join(TIMESERIES_FILE);
    let mut ts = TimeseriesWriter::new(create(&ts_path)?).map_err(|e| Error::io(&ts_path, e))?;
    let snapshots = config.snapshot_every > 0;
    let snap_dir = dir.join(SNAPSHOT_DIR);
    let index_path = dir.join(SNAPSHOT_INDEX_FILE);
    let mut index = if snapshots {
        fs::create_dir_all(&snap_dir).map_err(|e| Error::io(&snap_dir, e))?;
        let mut w = create(&index_path)?;
        writeln!(w, "{SNAPSHOT_INDEX_HEADER}").map_err(|e| Error::io(&index_path, e))?;
        Some(w)
    } else {
        None
    };

    let mut max_h3 = 0.0f64;
    let mut min_margin = f64::INFINITY;
    let mut last_step = 0;
    let mut last_snapshot = None;
    let write_snap = |step: usize, state: &SolverState, index: &mut BufWriter<File>| -> Result<()> {
        let phi_name = format!("{SNAPSHOT_DIR}/phi_{step:06}.txt");
        let phit_name = format!("{SNAPSHOT_DIR}/phit_{step:06}.txt");
        write_snapshot(&dir.join(&phi_name), state.phi.spectrum())?;
        write_snapshot(&dir.join(&phit_name), state.phi_t.spectrum())?;
        writeln!(index, "{step},{},{phi_name},{phit_name}", state.t).map_err(|e| Error::io(&index_path, e))
    };
    let outcome = run(config, data.phi0.clone(), data.phi1.clone(), |record| {
        ts.write_row(&TimeseriesRow::from_record(record)).map_err(|e| Error::io(&ts_path, e))?;
        max_h3 = max_h3.max(record.h3_norm);
        min_margin = min_margin.min(record.stability.margin);
        last_step = record.step;
        if let Some(index) = index.as_mut() {
            if record.step % config.snapshot_every == 0 {
                write_snap(record.step, record.state, index)?;
                last_snapshot = Some(record.step);
            }
        }
        Ok(())
    })?;
    ts.finish().map_err(|e| Error::io(&ts_path, e))?;
    if let Some(mut index) = index {
        if last_snapshot != Some(last_step) {
            write_snap(last_step, &outcome.final_state, &mut index)?;
        }
        index.flush().map_err(|e| Error::io(&index_path, e))?;
    }

    let events_path = dir.join(EVENTS_FILE);
    let log: String = outcome.events.iter().map(|e| format!("{e}\n")).collect();
    fs::write(&events_path, log).map_err(|e| Error::io(&events_path, e))?;

    Ok(RunSummary {
        directory: dir.to_path_buf(),
        steps: outcome.steps,
        dt: outcome.dt,
        final_t: outcome.final_state.t,
        halted: outcome.halted,
        data_size_squared: data.size_squared,
        max_h3_norm: max_h3,
        min_margin,
    })
}

/// One snapshot pair listed in `snapshots.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotEntry {
    pub step: usize,
    pub t: f64,
    pub phi_file: PathBuf,
    pub phit_file: PathBuf,
}

pub fn read_snapshot_index(dir: &Path) -> Result<Vec<SnapshotEntry>> {
    let path = dir.join(SNAPSHOT_INDEX_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        let bad = || Error::Parse {
            path: path.clone(),
            line: i + 1,
            message: format!("expected `{SNAPSHOT_INDEX_HEADER}`, got `{line}`"),
        };
        if cells.len() != 4 {
            return Err(bad());
        }
        out.push(SnapshotEntry {
            step: cells[0].parse().map_err(|_| bad())?,
            t: cells[1].parse().map_err(|_| bad())?,
            phi_file: dir.join(cells[2]),
            phit_file: dir.join(cells[3]),
        });
    }
    Ok(out)
}

pub fn load_snapshot_state(entry: &SnapshotEntry) -> Result<SolverState> {
    let phi = PeriodicField::from_spectrum(read_snapshot(&entry.phi_file)?)?;
    let phi_t = PeriodicField::from_spectrum(read_snapshot(&entry.phit_file)?)?;
    SolverState::new(entry.t, phi, phi_t)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnoseSummary {
    pub rows: usize,
    pub riccati: Option<RiccatiReport>,
    /// Why the Riccati columns are `na`, if they are.
    pub riccati_note: Option<String>,
    /// Largest relative difference between the logged energy and the energy
    /// recomputed from snapshots.
    pub snapshot_energy_mismatch: Option<f64>,
}

/// Reads a run directory and writes `energy_report.csv`.
pub fn diagnose_directory(dir: &Path, delta: Option<f64>) -> Result<DiagnoseSummary> {
    let config_path = dir.join(CONFIG_FILE);
    let config_text = fs::read_to_string(&config_path).map_err(|e| Error::io(&config_path, e))?;
    let config = parse_config(&config_text)?;
    let delta = delta.unwrap_or(config.delta);
    let rows = read_timeseries(&dir.join(TIMESERIES_FILE))?;

    let samples: Vec<TrajectorySample> = rows
        .iter()
        .map(|r| TrajectorySample {
            t: r.t,
            y: r.energy_r2.signum() * r.energy_r2.abs().sqrt(),
            margin: r.margin_min,
        })
        .collect();
    let (riccati, riccati_note) = match riccati_check(&samples, delta) {
        Ok(report) => {
            let note = report.skipped.clone();
            (Some(report), note)
        }
        Err(e) => (None, Some(e.to_string())),
    };

    let snapshot_energy_mismatch = if dir.join(SNAPSHOT_INDEX_FILE).exists() {
        let mut worst = 0.0f64;
        for entry in read_snapshot_index(dir)? {
            let state = load_snapshot_state(&entry)?;
            let recomputed = energy(&state, config.mu, REPORTED_ENERGY_INDEX).energy;
            if let Some(row) = rows.get(entry.step) {
                let scale = row.energy_r2.abs().max(f64::MIN_POSITIVE);
                worst = worst.max((recomputed - row.energy_r2).abs() / scale);
            }
        }
        Some(worst)
    } else {
        None
    };

    let path = dir.join(ENERGY_REPORT_FILE);
    let mut w = create(&path)?;
    let io = |e| Error::io(&path, e);
    writeln!(w, "{ENERGY_REPORT_HEADER}").map_err(io)?;
    let checked = riccati.as_ref().filter(|r| r.skipped.is_none());
    for (i, (row, s)) in rows.iter().zip(&samples).enumerate() {
        let (lhs, rhs, ok) = match checked {
            Some(r) => {
                let rr = &r.rows[i];
                let ok = match rr.bound_ok {
                    Some(true) => "true",
                    Some(false) => "false",
                    None => "na",
                };
                (rr.y.to_string(), rr.bound.to_string(), ok)
            }
            None => ("na".into(), "na".into(), "na"),
        };
        writeln!(w, "{},{},{},{},{lhs},{rhs},{ok}", row.t, row.energy_r2, s.y, row.margin_min).map_err(io)?;
    }
    w.flush().map_err(io)?;
    Ok(DiagnoseSummary {
        rows: rows.len(),
        riccati,
        riccati_note,
        snapshot_energy_mismatch,
    })
}
