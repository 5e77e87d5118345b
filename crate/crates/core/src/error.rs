use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid size {0}: need an even number of points, at least 8")]
    InvalidGrid(usize),

    #[error("grid mismatch: {left} points vs {right} points")]
    GridMismatch { left: usize, right: usize },

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    #[error("inconsistent spectrum: Hermitian defect {defect:.3e} at mode {mode}")]
    InconsistentSpectrum { mode: i64, defect: f64 },

    #[error("synthesized field has imaginary residue {residue:.3e}")]
    ImaginaryResidue { residue: f64 },

    #[error("expected a zero-mean field, mean is {mean:.3e}")]
    NonZeroMean { mean: f64 },

    #[error("mode {mode} outside the retained band |k| <= {max_mode}")]
    ModeOutOfBand { mode: i64, max_mode: i64 },

    #[error("symbol bound violated at mode {mode}: <k>^-m |A(k)| = {value:.6e} > {bound:.6e}")]
    SymbolBound { mode: i64, value: f64, bound: f64 },

    #[error("kernel value overflows 64-bit range at (m, l) = ({m}, {l})")]
    KernelOverflow { m: i64, l: i64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate ensemble: every trial was skipped")]
    DegenerateEnsemble,

    #[error("zeroth-order state is off the transition manifold: Delta = {delta:.3e}")]
    OffTransitionManifold { delta: f64 },

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("config: {0}")]
    ConfigMissing(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
