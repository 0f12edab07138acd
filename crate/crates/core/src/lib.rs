//! Steady states of a V-type three-level atom with spontaneously generated
//! coherence in two orthogonal standing waves, and the probe-absorption maps
//! χ''(x, y) used for 2D atom localization.
//!
//! Module map:
//! - [`numerics`]: LU solve, 3×3 Hermitian eigenvalues, RK4 step
//! - [`model`]: parameters, equations of motion, steady state, oracles
//! - [`localization`]: χ'' maps, peak detection, sweeps
//! - [`io`]: configuration and CSV/PGM/JSON output
//! - [`cli`]: command-line entry point
//! - [`validate`]: oracle cross-check suite

pub mod cli;
pub mod error;
pub mod io;
pub mod localization;
pub mod model;
pub mod numerics;
pub mod validate;

pub use error::{Error, Result};
pub use localization::{chi_imag, find_peaks, scan, sweep, GridSpec, LocalizationMap, Peak, PeakReport, Quadrant, SweepParam};
pub use model::{steady_state, DensityMatrix, Level, PhysParams};
