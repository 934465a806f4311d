use ndarray::Array2;
use statrs::function::erf::erf;

use super::CoincidenceMap;
use crate::error::{invalid, Result};

/// Bin-integrated Gaussian weights of standard deviation `sigma` for a grid
/// of width `delta`, indexed from `-half` to `half`. Weights sum to one.
pub fn gaussian_bin_weights(delta: f64, sigma: f64) -> Vec<f64> {
    if sigma == 0.0 {
        return vec![1.0];
    }
    let half = (10.0 * sigma / delta).ceil() as i64 + 1;
    let cdf = |e: f64| 0.5 * (1.0 + erf(e / (sigma * std::f64::consts::SQRT_2)));
    let mut w: Vec<f64> = (-half..=half)
        .map(|j| {
            let lo = (j as f64 - 0.5) * delta;
            let hi = (j as f64 + 0.5) * delta;
            // integrate over the tail closest to zero for accuracy
            if lo >= 0.0 {
                cdf(-lo) - cdf(-hi)
            } else {
                cdf(hi) - cdf(lo)
            }
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

fn convolve_rows(values: &Array2<f64>, w: &[f64]) -> Array2<f64> {
    let (n1, n2) = values.dim();
    let half = (w.len() / 2) as isize;
    let mut out = Array2::zeros((n1, n2));
    for i in 0..n1 {
        for j in 0..n2 {
            let v = values[(i, j)];
            if v == 0.0 {
                continue;
            }
            for (t, &wt) in w.iter().enumerate() {
                let jj = j as isize + t as isize - half;
                if jj >= 0 && (jj as usize) < n2 {
                    out[(i, jj as usize)] += wt * v;
                }
            }
        }
    }
    out
}

/// Isotropic Gaussian detector blur of standard deviation `sigma` (eV) on
/// both axes. `sigma = 0` returns the map unchanged.
pub fn blur(map: &CoincidenceMap, sigma: f64) -> Result<CoincidenceMap> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(invalid(format!("blur width must be nonnegative, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(map.clone());
    }
    let w = gaussian_bin_weights(map.grid().delta(), sigma);
    let rows = convolve_rows(map.values(), &w);
    let both = convolve_rows(&rows.t().to_owned(), &w).t().to_owned();
    Ok(CoincidenceMap::from_parts_unchecked(*map.grid(), both))
}
