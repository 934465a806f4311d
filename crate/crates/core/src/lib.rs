//! Simulation and inference for two-electron photon-sideband quantum walks.
//!
//! - [`grid`]: energy axes, spectra, coincidence maps, blur, visibility, file formats
//! - [`walk`]: laser-modulated forward models for one and two electrons
//! - [`state`]: the entangled/separable state family, Schmidt modes, negativity
//! - [`tomography`]: global least-squares fit of the state family with errors
//! - [`gas`]: classical Coulomb dynamics of the photoemitted electron gas
//! - [`synth`]: synthetic reference maps and datasets

pub mod error;
pub mod gas;
pub mod grid;
pub mod state;
pub mod synth;
pub mod tomography;
pub mod walk;

pub use error::{Error, Result};
pub use grid::{CoincidenceMap, EnergyGrid, PairWavefunction, Spectrum1D, Visibility};
pub use state::{EntanglementModel, PhaseParams, SchmidtDecomposition};
pub use walk::{Coupling, CouplingSpread};
