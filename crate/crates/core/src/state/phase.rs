use std::fmt;
use std::sync::Arc;

/// Arbitrary phase `G(E1 + E2)` of the total energy (in photon units).
pub type SumPhase = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Two-electron phase
/// `phi(E1, E2) = (E1 - E2)(alpha + beta E1 / 2 + gamma E2 / 2) + G(E1 + E2)`
/// with energies in units of the photon energy relative to the zero-loss peak.
#[derive(Clone, Default)]
pub struct PhaseParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    sum_phase: Option<SumPhase>,
}

impl fmt::Debug for PhaseParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhaseParams")
            .field("alpha", &self.alpha)
            .field("beta", &self.beta)
            .field("gamma", &self.gamma)
            .field("sum_phase", &self.sum_phase.as_ref().map(|_| "<fn>"))
            .finish()
    }
}

impl PhaseParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Self {
        Self { alpha, beta, gamma, sum_phase: None }
    }

    pub fn with_sum_phase(mut self, g: SumPhase) -> Self {
        self.sum_phase = Some(g);
        self
    }

    pub fn sum_phase(&self) -> Option<&SumPhase> {
        self.sum_phase.as_ref()
    }

    pub fn is_finite(&self) -> bool {
        self.alpha.is_finite() && self.beta.is_finite() && self.gamma.is_finite()
    }

    /// `phi(e1, e2)` in radians; `e1`, `e2` in photon units.
    pub fn phase_at(&self, e1: f64, e2: f64) -> f64 {
        let g = self.sum_phase.as_ref().map_or(0.0, |g| g(e1 + e2));
        (e1 - e2) * (self.alpha + self.beta * e1 / 2.0 + self.gamma * e2 / 2.0) + g
    }
}
