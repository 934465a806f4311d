//! Energy discretization shared by every model.
//!
//! The bin width is always `hbar_omega / k`, so absorbing or emitting one
//! photon moves probability by exactly `k` bins and no interpolation is ever
//! needed.

mod blur;
pub mod format;
mod maps;
mod visibility;

pub use blur::{blur, gaussian_bin_weights};
pub use maps::{CoincidenceMap, PairWavefunction, Spectrum1D};
pub use visibility::Visibility;

use crate::error::{invalid, Error, Result};

/// Uniform energy axis, in eV relative to the zero-loss peak.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyGrid {
    e_min: f64,
    delta: f64,
    n_bins: usize,
    hbar_omega: f64,
    k: usize,
}

impl EnergyGrid {
    /// Grid starting at `e_min` with `k` bins per photon spanning
    /// `n_photons_span` photon energies (`k * n_photons_span + 1` bins).
    pub fn new(e_min: f64, hbar_omega: f64, k: usize, n_photons_span: usize) -> Result<Self> {
        if !(hbar_omega > 0.0) || !hbar_omega.is_finite() {
            return Err(invalid(format!("photon energy must be positive, got {hbar_omega}")));
        }
        if k == 0 {
            return Err(invalid("bins per photon must be at least 1"));
        }
        if !e_min.is_finite() {
            return Err(invalid("e_min must be finite"));
        }
        if n_photons_span < 2 {
            return Err(invalid(format!(
                "span must cover at least two photon energies, got {n_photons_span}"
            )));
        }
        Ok(Self {
            e_min,
            delta: hbar_omega / k as f64,
            n_bins: k * n_photons_span + 1,
            hbar_omega,
            k,
        })
    }

    /// Grid given by its file header fields. `hbar_omega` must be an integer
    /// multiple of `delta`.
    pub fn from_parts(e_min: f64, delta: f64, n_bins: usize, hbar_omega: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(invalid(format!("bin width must be positive, got {delta}")));
        }
        if !(hbar_omega > 0.0) || !hbar_omega.is_finite() || !e_min.is_finite() {
            return Err(invalid("photon energy must be positive and e_min finite"));
        }
        let ratio = hbar_omega / delta;
        let k = ratio.round();
        if k < 1.0 || (ratio - k).abs() > 1e-9 * ratio {
            return Err(invalid(format!(
                "photon energy {hbar_omega} is not an integer multiple of bin width {delta}"
            )));
        }
        let k = k as usize;
        if n_bins < 2 * k + 1 {
            return Err(invalid(format!("need at least {} bins, got {n_bins}", 2 * k + 1)));
        }
        Ok(Self { e_min, delta, n_bins, hbar_omega, k })
    }

    pub fn e_min(&self) -> f64 {
        self.e_min
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn hbar_omega(&self) -> f64 {
        self.hbar_omega
    }

    /// Bins per photon energy.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn e_max(&self) -> f64 {
        self.energy(self.n_bins - 1)
    }

    /// Center energy of bin `i` in eV.
    pub fn energy(&self, i: usize) -> f64 {
        self.e_min + i as f64 * self.delta
    }

    /// Center energy of bin `i` in units of the photon energy.
    pub fn energy_in_photons(&self, i: usize) -> f64 {
        self.energy(i) / self.hbar_omega
    }

    pub fn energies(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_bins).map(move |i| self.energy(i))
    }

    /// Nearest bin to `e`, if it lies on the grid.
    pub fn index_of(&self, e: f64) -> Option<usize> {
        let x = ((e - self.e_min) / self.delta).round();
        (x >= 0.0 && x < self.n_bins as f64).then_some(x as usize)
    }

    pub fn is_compatible(&self, other: &EnergyGrid) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (a.abs().max(b.abs()).max(1.0));
        self.n_bins == other.n_bins
            && self.k == other.k
            && close(self.e_min, other.e_min)
            && close(self.delta, other.delta)
            && close(self.hbar_omega, other.hbar_omega)
    }

    pub(crate) fn ensure_compatible(&self, other: &EnergyGrid) -> Result<()> {
        if self.is_compatible(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}
