use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::grid::CoincidenceMap;

/// One laser-on coincidence map.
#[derive(Debug, Clone)]
pub struct Observation {
    pub label: String,
    pub power_mw: f64,
    pub map: CoincidenceMap,
}

/// Laser-off reference plus the laser-on maps fitted together.
///
/// Observed maps may carry noise, so only their grid and finiteness are checked.
#[derive(Debug, Clone)]
pub struct Dataset {
    reference: CoincidenceMap,
    observations: Vec<Observation>,
}

impl Dataset {
    pub fn new(reference: CoincidenceMap, observations: Vec<Observation>) -> Result<Self> {
        if observations.is_empty() {
            return Err(invalid("dataset needs at least one laser-on observation"));
        }
        if !reference.is_normalized() {
            return Err(invalid(format!("reference map has mass {}, expected 1", reference.mass())));
        }
        reference.ensure_nonnegative()?;
        for o in &observations {
            reference.grid().ensure_compatible(o.map.grid())?;
        }
        Ok(Self { reference, observations })
    }

    pub fn reference(&self) -> &CoincidenceMap {
        &self.reference
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    /// Number of fitted data points (all bins of all laser-on maps).
    pub fn n_data(&self) -> usize {
        let n = self.reference.grid().n_bins();
        n * n * self.observations.len()
    }
}

/// Parameters of the fitted state family and detector.
///
/// Vector order: `f, alpha, beta, gamma, g_1 .. g_m, sigma, ratio`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitParams {
    pub f: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub g: Vec<f64>,
    pub sigma: f64,
    pub ratio: f64,
}

impl FitParams {
    pub fn len(&self) -> usize {
        6 + self.g.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.f) {
            return Err(invalid(format!("f must lie in [0, 1], got {}", self.f)));
        }
        if ![self.alpha, self.beta, self.gamma].iter().all(|v| v.is_finite()) {
            return Err(invalid("phase parameters must be finite"));
        }
        if self.g.is_empty() || self.g.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
            return Err(invalid("every coupling must be positive"));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(invalid(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        if !(self.ratio >= 0.0 && self.ratio.is_finite()) {
            return Err(invalid(format!("spread ratio must be >= 0, got {}", self.ratio)));
        }
        Ok(())
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.f, self.alpha, self.beta, self.gamma];
        v.extend_from_slice(&self.g);
        v.push(self.sigma);
        v.push(self.ratio);
        v
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        if v.len() < 7 {
            return Err(invalid(format!("parameter vector too short: {}", v.len())));
        }
        let m = v.len() - 6;
        Ok(Self {
            f: v[0],
            alpha: v[1],
            beta: v[2],
            gamma: v[3],
            g: v[4..4 + m].to_vec(),
            sigma: v[4 + m],
            ratio: v[5 + m],
        })
    }

    pub fn names(&self) -> Vec<String> {
        let mut n: Vec<String> = ["f", "alpha", "beta", "gamma"].iter().map(|s| s.to_string()).collect();
        n.extend((1..=self.g.len()).map(|i| format!("g{i}")));
        n.push("sigma".into());
        n.push("ratio".into());
        n
    }

    /// Lower and upper bounds per vector entry.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        let inf = f64::INFINITY;
        let mut b = vec![(0.0, 1.0), (-inf, inf), (-inf, inf), (-inf, inf)];
        b.extend(std::iter::repeat_n((1e-9, inf), self.g.len()));
        b.push((0.0, inf));
        b.push((0.0, inf));
        b
    }

    /// Equivalent parameters with `alpha` in `[0, pi/2]`.
    ///
    /// The maps depend on `alpha` modulo `pi`, and flipping the sign of all
    /// three phase coefficients conjugates the state without changing them.
    pub fn canonical(&self) -> Self {
        let mut p = self.clone();
        p.alpha = p.alpha.rem_euclid(PI);
        if p.alpha > PI / 2.0 {
            p.alpha = PI - p.alpha;
            p.beta = -p.beta;
            p.gamma = -p.gamma;
        }
        p
    }
}
