//! Plain-text spectrum snapshots: one line `k re im` per retained mode, in
//! ascending `k`, printed with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;

use super::{Grid, Spectrum};
use crate::error::{Error, Result};

pub fn format_snapshot(spectrum: &Spectrum) -> String {
    let mut out = String::with_capacity(spectrum.coeffs().len() * 56);
    for (k, c) in spectrum.iter() {
        writeln!(out, "{k} {:.16e} {:.16e}", c.re, c.im).expect("writing to a String");
    }
    out
}

/// Parses a snapshot; the grid size is inferred as `2K + 2`.
pub fn parse_snapshot(text: &str, path: &Path) -> Result<Spectrum> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut modes = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(i + 1, format!("expected `k re im`, got {} fields", fields.len())));
        }
        let k: i64 = fields[0]
            .parse()
            .map_err(|_| err(i + 1, format!("bad mode `{}`", fields[0])))?;
        let re: f64 = fields[1]
            .parse()
            .map_err(|_| err(i + 1, format!("bad real part `{}`", fields[1])))?;
        let im: f64 = fields[2]
            .parse()
            .map_err(|_| err(i + 1, format!("bad imaginary part `{}`", fields[2])))?;
        if let Some(&(prev, _, _)) = modes.last() {
            if k != prev + 1 {
                return Err(err(i + 1, format!("mode {k} does not follow {prev}")));
            }
        }
        modes.push((k, Complex64::new(re, im), i + 1));
    }
    let Some(&(first, _, _)) = modes.first() else {
        return Err(err(0, "empty snapshot".into()));
    };
    let k_max = -first;
    if k_max < 3 || modes.len() as i64 != 2 * k_max + 1 {
        return Err(err(
            modes.last().map_or(0, |m| m.2),
            format!("modes must run from -K to K with K >= 3, got {first}..{}", modes.len() as i64 + first - 1),
        ));
    }
    let grid = Grid::new((2 * k_max + 2) as usize)?;
    Spectrum::from_coeffs(&grid, modes.into_iter().map(|m| m.1).collect())
}

pub fn write_snapshot(path: &Path, spectrum: &Spectrum) -> Result<()> {
    fs::write(path, format_snapshot(spectrum)).map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<Spectrum> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_snapshot(&text, path)
}
