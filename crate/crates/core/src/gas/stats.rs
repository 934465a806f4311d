use super::{GasState, TipField, FWHM_PER_SIGMA};
use crate::error::{invalid, Error, Result};
use crate::grid::{EnergyGrid, Spectrum1D};

/// Quantile with linear interpolation between order statistics.
pub(crate) fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Mean and median nearest-neighbour distance (nm) among active electrons.
pub fn nearest_neighbor_stats(state: &GasState) -> Result<(f64, f64)> {
    let p: Vec<[f64; 3]> = state.active().map(|e| e.position).collect();
    if p.len() < 2 {
        return Err(Error::Undefined(format!("nearest neighbours need two electrons, have {}", p.len())));
    }
    let mut best = vec![f64::INFINITY; p.len()];
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let d = [p[i][0] - p[j][0], p[i][1] - p[j][1], p[i][2] - p[j][2]];
            let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
            best[i] = best[i].min(r2);
            best[j] = best[j].min(r2);
        }
    }
    let mut d: Vec<f64> = best.iter().map(|r2| r2.sqrt()).collect();
    d.sort_by(f64::total_cmp);
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    Ok((mean, quantile(&d, 0.5)))
}

/// Spread of a set of electron energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Widths {
    pub mean: f64,
    /// Gaussian-equivalent FWHM, 2.3548 standard deviations.
    pub fwhm: f64,
    pub iqr: f64,
}

pub fn spread_widths(energies: &[f64]) -> Widths {
    if energies.is_empty() {
        return Widths { mean: 0.0, fwhm: 0.0, iqr: 0.0 };
    }
    let n = energies.len() as f64;
    let mean = energies.iter().sum::<f64>() / n;
    let var = energies.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / n;
    let mut s = energies.to_vec();
    s.sort_by(f64::total_cmp);
    Widths { mean, fwhm: FWHM_PER_SIGMA * var.sqrt(), iqr: quantile(&s, 0.75) - quantile(&s, 0.25) }
}

/// Per-electron energy relative to the local electrostatic potential:
/// kinetic plus field potential energy.
pub(crate) fn local_energies(state: &GasState, field: &TipField) -> Vec<f64> {
    state.active().map(|e| e.kinetic_energy() + field.potential_energy(&e.position)).collect()
}

#[derive(Debug, Clone)]
pub struct EnergySpectrum {
    /// Histogram density of the final energies; electrons outside the grid are dropped.
    pub spectrum: Spectrum1D,
    /// Final energy per active electron: kinetic energy plus the remaining potential drop.
    pub energies: Vec<f64>,
    pub median: f64,
    pub iqr: f64,
}

/// Histogram of the energies the electrons will have after the remaining
/// acceleration, on `n_bins` bins of width `delta` starting at `e_min`.
pub fn energy_spectrum(state: &GasState, field: &TipField, e_min: f64, delta: f64, n_bins: usize) -> Result<EnergySpectrum> {
    let energies: Vec<f64> = state.active().map(|e| e.kinetic_energy() + field.remaining_drop(&e.position)).collect();
    if energies.is_empty() {
        return Err(invalid("energy spectrum needs at least one active electron"));
    }
    let grid = EnergyGrid::from_parts(e_min, delta, n_bins, delta)?;
    let mut counts = ndarray::Array1::<f64>::zeros(n_bins);
    let w = 1.0 / (energies.len() as f64 * delta);
    for &e in &energies {
        let idx = ((e - e_min) / delta + 0.5).floor();
        if idx >= 0.0 && (idx as usize) < n_bins {
            counts[idx as usize] += w;
        }
    }
    let mut sorted = energies.clone();
    sorted.sort_by(f64::total_cmp);
    Ok(EnergySpectrum {
        spectrum: Spectrum1D::new(grid, counts)?,
        median: quantile(&sorted, 0.5),
        iqr: quantile(&sorted, 0.75) - quantile(&sorted, 0.25),
        energies,
    })
}
