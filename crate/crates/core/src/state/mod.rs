//! The pair-state family `rho(f, phi) = f |psi(phi)><psi(phi)| + (1 - f) rho_sep`
//! built on a measured unmodulated map, with its Schmidt decomposition and
//! entanglement negativity.

mod entangled;
mod negativity;
mod phase;
mod schmidt;

pub use entangled::{blend, build_entangled, EntanglementModel};
pub use negativity::{negativity, negativity_bruteforce, DEFAULT_TRUNCATION};
pub use phase::{PhaseParams, SumPhase};
pub use schmidt::{schmidt, SchmidtCutoff, SchmidtDecomposition};
