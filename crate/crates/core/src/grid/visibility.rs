use super::{CoincidenceMap, Spectrum1D};
use crate::error::{invalid, Error, Result};

/// Fringe visibility `(C_max - C_min) / (C_max + C_min)` over the bins with
/// `|E| < window` (on both axes for maps).
pub trait Visibility {
    fn visibility(&self, window: f64) -> Result<f64>;
}

fn contrast(values: impl Iterator<Item = f64>) -> Result<f64> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !(hi + lo > 0.0) {
        return Err(Error::UndefinedVisibility);
    }
    Ok((hi - lo) / (hi + lo))
}

fn check_window(window: f64) -> Result<()> {
    if window > 0.0 && window.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("visibility window must be positive, got {window}")))
    }
}

impl Visibility for Spectrum1D {
    fn visibility(&self, window: f64) -> Result<f64> {
        check_window(window)?;
        let g = *self.grid();
        contrast(
            self.values()
                .iter()
                .enumerate()
                .filter(|(i, _)| g.energy(*i).abs() < window)
                .map(|(_, &v)| v),
        )
    }
}

impl Visibility for CoincidenceMap {
    fn visibility(&self, window: f64) -> Result<f64> {
        check_window(window)?;
        let g = *self.grid();
        contrast(
            self.values()
                .indexed_iter()
                .filter(|((i, j), _)| g.energy(*i).abs() < window && g.energy(*j).abs() < window)
                .map(|(_, &v)| v),
        )
    }
}
