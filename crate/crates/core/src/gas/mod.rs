//! Classical point-particle dynamics of the photoemitted electron gas:
//! emission from a tip, acceleration in a static field, pairwise Coulomb
//! repulsion, and the resulting energy spread and inter-electron distances.
//!
//! Units: nm, fs, eV, elementary charge.

mod config;
mod dynamics;
mod export;
mod field;
mod run;
mod state;
mod stats;

pub use config::{EmitterConfig, FieldModel};
pub use dynamics::{coulomb_energy, coulomb_forces, step, step_with, total_energy, Scheme};
pub use export::{diagnostics_table, snapshot_table};
pub use field::TipField;
pub use run::{run, GasDiagnostics, RunOptions, RunOutput};
pub use state::{sample_emission, Electron, GasState, Status};
pub use stats::{energy_spectrum, nearest_neighbor_stats, spread_widths, EnergySpectrum, Widths};

/// Electron rest mass in eV fs^2 / nm^2.
pub const ELECTRON_MASS: f64 = 510_998.950 / (299.792_458 * 299.792_458);
/// `e^2 / (4 pi eps0)` in eV nm.
pub const COULOMB_CONSTANT: f64 = 1.439_964_548;
/// Ratio of FWHM to standard deviation for a Gaussian.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949;
