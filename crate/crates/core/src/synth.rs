//! Synthetic laser-off references and laser-on datasets.

use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

use crate::error::{invalid, Result};
use crate::grid::{CoincidenceMap, EnergyGrid};
use crate::tomography::{Dataset, FitParams, ForwardModel, Observation};

/// Anti-correlated two-peak pair distribution: Gaussian blobs at
/// `(+s/2, -s/2)` and `(-s/2, +s/2)`, so each marginal has two peaks `s` apart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTemplate {
    pub separation: f64,
    pub width: f64,
    /// Values below `cutoff * peak` are set to zero.
    pub cutoff: f64,
}

impl Default for PairTemplate {
    fn default() -> Self {
        Self { separation: 1.5, width: 0.35, cutoff: 1e-10 }
    }
}

impl PairTemplate {
    pub fn reference(&self, grid: EnergyGrid) -> Result<CoincidenceMap> {
        if !(self.width > 0.0) || !self.separation.is_finite() || !(self.cutoff >= 0.0) {
            return Err(invalid("template needs width > 0, finite separation and cutoff >= 0"));
        }
        let h = self.separation / 2.0;
        let w2 = 2.0 * self.width * self.width;
        let blob = |x: f64, y: f64| (-(x * x + y * y) / w2).exp();
        let raw = CoincidenceMap::from_fn(grid, |a, b| blob(a - h, b + h) + blob(a + h, b - h))?;
        let peak = raw.values().fold(0.0f64, |m, &v| m.max(v));
        let cut = raw.values().mapv(|v| if v < self.cutoff * peak { 0.0 } else { v });
        CoincidenceMap::new(grid, cut)?.normalized()
    }
}

/// Forward maps at `params` for each power, plus bin-wise Gaussian noise of
/// standard deviation `noise_frac` times each map's peak.
pub fn synthesize(
    params: &FitParams,
    reference: &CoincidenceMap,
    powers_mw: &[f64],
    nodes: usize,
    noise_frac: f64,
    seed: u64,
) -> Result<Dataset> {
    if powers_mw.len() != params.g.len() {
        return Err(invalid(format!("{} powers for {} couplings", powers_mw.len(), params.g.len())));
    }
    if !(noise_frac >= 0.0) {
        return Err(invalid(format!("noise fraction must be >= 0, got {noise_frac}")));
    }
    let model = ForwardModel::with_nodes(reference.clone(), nodes)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut observations = Vec::with_capacity(powers_mw.len());
    for (i, &power) in powers_mw.iter().enumerate() {
        let clean = model.map(params, i)?;
        let map = if noise_frac > 0.0 {
            let peak = clean.values().fold(0.0f64, |m, &v| m.max(v));
            let normal = Normal::new(0.0, noise_frac * peak).map_err(|e| invalid(e.to_string()))?;
            let noisy = clean.values().mapv(|v| v + normal.sample(&mut rng));
            CoincidenceMap::new(*clean.grid(), noisy)?
        } else {
            clean
        };
        observations.push(Observation { label: format!("{power}mW"), power_mw: power, map });
    }
    Dataset::new(reference.clone(), observations)
}
