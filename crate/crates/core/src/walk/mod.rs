//! Laser-modulated spectra: the single-electron walk and the two-electron
//! coincidence maps for pure, mixed, separable and classical pairs.

mod bessel;
mod classical;
mod pure;
mod separable;
mod spread;

pub use bessel::{BesselTable, DEFAULT_EPS};
pub use classical::{arcsine_bin_weights, classical_1e, coincidence_classical};
pub use pure::{coincidence_mixed, coincidence_pure, propagate_pure};
pub use separable::{coincidence_separable, walk_1e};
pub use spread::{average_over_coupling, CouplingSpread};

use ndarray::{Array1, Array2};

use crate::error::{invalid, Error, Result};

/// Largest fraction of probability allowed to leave the grid edges.
pub const MAX_EDGE_LOSS: f64 = 1e-6;

/// Laser-electron coupling `g`. The phase is `None` when it is averaged over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    magnitude: f64,
    phase: Option<f64>,
}

impl Coupling {
    /// Coupling of strength `|g|` with unlocked (averaged) phase.
    pub fn new(magnitude: f64) -> Result<Self> {
        if !(magnitude >= 0.0) || !magnitude.is_finite() {
            return Err(invalid(format!("coupling magnitude must be >= 0, got {magnitude}")));
        }
        Ok(Self { magnitude, phase: None })
    }

    pub fn with_phase(magnitude: f64, phase: f64) -> Result<Self> {
        if !phase.is_finite() {
            return Err(invalid("coupling phase must be finite"));
        }
        Ok(Self { phase: Some(phase), ..Self::new(magnitude)? })
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn phase(&self) -> Option<f64> {
        self.phase
    }

    pub fn is_zero(&self) -> bool {
        self.magnitude == 0.0
    }

    pub(crate) fn bessel(&self) -> BesselTable {
        BesselTable::for_coupling(self.magnitude, DEFAULT_EPS)
    }
}

pub(crate) fn check_loss(mass_in: f64, mass_out: f64) -> Result<()> {
    if mass_in == 0.0 {
        return Ok(());
    }
    let lost = (mass_in - mass_out) / mass_in;
    if lost > MAX_EDGE_LOSS {
        Err(Error::GridTooNarrow { lost })
    } else {
        Ok(())
    }
}

/// Add `weight * src` translated by `offset` bins along axis 0 into `dst`.
fn add_shifted_rows(dst: &mut Array2<f64>, src: &Array2<f64>, offset: isize, weight: f64) {
    let n = src.nrows() as isize;
    let lo = offset.max(0);
    let hi = (n + offset).min(n);
    for i in lo..hi {
        let s = (i - offset) as usize;
        let mut d = dst.row_mut(i as usize);
        d.scaled_add(weight, &src.row(s));
    }
}

/// Incoherent comb `sum_n w_n src(E - n hbar_omega)` along axis 0.
pub(crate) fn comb_rows(src: &Array2<f64>, k: usize, weights: &[(i64, f64)]) -> Array2<f64> {
    let mut out = Array2::zeros(src.dim());
    for &(n, w) in weights {
        add_shifted_rows(&mut out, src, n as isize * k as isize, w);
    }
    out
}

/// Both-axis comb; the same weights apply to each electron.
pub(crate) fn comb_both(src: &Array2<f64>, k: usize, weights: &[(i64, f64)]) -> Array2<f64> {
    let rows = comb_rows(src, k, weights);
    comb_rows(&rows.t().to_owned(), k, weights).t().to_owned()
}

pub(crate) fn comb_1d(src: &Array1<f64>, k: usize, weights: &[(i64, f64)]) -> Array1<f64> {
    let len = src.len() as isize;
    let mut out = Array1::zeros(src.len());
    for &(n, w) in weights {
        let off = n as isize * k as isize;
        for i in off.max(0)..(len + off).min(len) {
            out[i as usize] += w * src[(i - off) as usize];
        }
    }
    out
}
