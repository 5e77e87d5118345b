//! Pseudo-spectral toolkit for the quadratically nonlinear, nonlocal amplitude
//! equation of current-vortex sheets,
//!
//! ```text
//! φ_tt − μ φ_xx = (½ H[φ̃²]_xx + φ̃ φ_xx)_x,   φ̃ = H[φ],
//! ```
//!
//! on the torus, together with its Hilbert-transform calculus, energy
//! diagnostics and stability margins.

// Negated float comparisons below are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod config;
pub mod diagnostics;
pub mod ensemble;
pub mod error;
pub mod estimates;
pub mod evolution;
pub mod hilbert;
pub mod initial;
pub mod output;
pub mod quadratic;
pub mod rng;
pub mod spectral;

pub use error::{Error, Result};
