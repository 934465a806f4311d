use ndarray::Array2;
use std::f64::consts::PI;

use super::{check_loss, Coupling};
use crate::error::Result;
use crate::grid::{CoincidenceMap, Spectrum1D};

/// Per-bin probabilities of the arcsine distribution `1/(pi sqrt(A^2 - E^2))`
/// on `|E| < amplitude`, integrated exactly over each bin. Returns the offset
/// of the first bin (in bins from zero) and the weights, which sum to one.
pub fn arcsine_bin_weights(delta: f64, amplitude: f64) -> (i64, Vec<f64>) {
    if amplitude == 0.0 {
        return (0, vec![1.0]);
    }
    // last bin whose lower edge is still inside (-A, A)
    let last = ((amplitude / delta + 0.5).ceil() as i64 - 1).max(0);
    let cdf = |e: f64| (e / amplitude).clamp(-1.0, 1.0).asin();
    let mut w: Vec<f64> = (-last..=last)
        .map(|j| (cdf((j as f64 + 0.5) * delta) - cdf((j as f64 - 0.5) * delta)) / PI)
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    (-last, w)
}

fn kernel(p: &Spectrum1D, g: &Coupling) -> (i64, Vec<f64>) {
    let grid = p.grid();
    arcsine_bin_weights(grid.delta(), 2.0 * g.magnitude() * grid.hbar_omega())
}

fn convolve_rows(src: &Array2<f64>, first: i64, w: &[f64]) -> Array2<f64> {
    let n = src.nrows() as i64;
    let mut out = Array2::zeros(src.dim());
    for (t, &wt) in w.iter().enumerate() {
        let off = first + t as i64;
        for i in off.max(0)..(n + off).min(n) {
            out.row_mut(i as usize).scaled_add(wt, &src.row((i - off) as usize));
        }
    }
    out
}

/// Point-particle spectrum of one electron: the input convolved with the
/// classical energy-gain distribution of half-width `2|g| hbar_omega`.
pub fn classical_1e(spectrum: &Spectrum1D, g: &Coupling) -> Result<Spectrum1D> {
    if g.is_zero() {
        return Ok(spectrum.clone());
    }
    let (first, w) = kernel(spectrum, g);
    let col = spectrum.values().clone().insert_axis(ndarray::Axis(1));
    let values = convolve_rows(&col, first, &w).remove_axis(ndarray::Axis(1));
    let out = Spectrum1D::new(*spectrum.grid(), values)?;
    check_loss(spectrum.mass(), out.mass())?;
    Ok(out)
}

/// Point-particle coincidence map: `p0` convolved on each axis with the
/// classical kernel of the same `|g|`.
pub fn coincidence_classical(p0: &CoincidenceMap, g: &Coupling) -> Result<CoincidenceMap> {
    if g.is_zero() {
        return Ok(p0.clone());
    }
    let grid = *p0.grid();
    let (first, w) = kernel(&p0.marginal(0), g);
    let rows = convolve_rows(p0.values(), first, &w);
    let both = convolve_rows(&rows.t().to_owned(), first, &w).t().to_owned();
    let out = CoincidenceMap::from_parts_unchecked(grid, both);
    check_loss(p0.mass(), out.mass())?;
    Ok(out)
}
