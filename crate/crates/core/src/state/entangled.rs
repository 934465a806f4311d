use num_complex::Complex64;

use super::PhaseParams;
use crate::error::{invalid, Result};
use crate::grid::{CoincidenceMap, PairWavefunction};
use crate::walk::{coincidence_pure, coincidence_separable, Coupling};

/// Entanglement fraction `f` mixing the pure state `sqrt(P) e^{i phi}` with a
/// separable state of the same diagonal `P`.
#[derive(Debug, Clone)]
pub struct EntanglementModel {
    f: f64,
    diag: CoincidenceMap,
    phase: PhaseParams,
}

impl EntanglementModel {
    pub fn new(f: f64, diag: CoincidenceMap, phase: PhaseParams) -> Result<Self> {
        if !(0.0..=1.0).contains(&f) {
            return Err(invalid(format!("entanglement fraction must lie in [0, 1], got {f}")));
        }
        if !diag.is_normalized() {
            return Err(invalid(format!("diagonal map has mass {}, expected 1", diag.mass())));
        }
        if !phase.is_finite() {
            return Err(invalid("phase parameters must be finite"));
        }
        diag.ensure_nonnegative()?;
        Ok(Self { f, diag, phase })
    }

    pub fn f(&self) -> f64 {
        self.f
    }

    pub fn diag(&self) -> &CoincidenceMap {
        &self.diag
    }

    pub fn phase(&self) -> &PhaseParams {
        &self.phase
    }
}

/// `psi(E1, E2) = sqrt(P(E1, E2)) e^{i phi(E1, E2)}`.
pub fn build_entangled(diag: &CoincidenceMap, phase: &PhaseParams) -> Result<PairWavefunction> {
    diag.ensure_nonnegative()?;
    let grid = *diag.grid();
    let amps = ndarray::Array2::from_shape_fn(diag.values().dim(), |(i, j)| {
        let p = diag.values()[(i, j)];
        if p == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let phi = phase.phase_at(grid.energy_in_photons(i), grid.energy_in_photons(j));
        Complex64::from_polar(p.sqrt(), phi)
    });
    PairWavefunction::new(grid, amps)
}

/// Laser-modulated map of `rho(f, phi)`: `f` times the pure-state map plus
/// `1 - f` times the separable map.
pub fn blend(model: &EntanglementModel, g: &Coupling) -> Result<CoincidenceMap> {
    let sep = || coincidence_separable(&model.diag, g);
    let pure = || coincidence_pure(&build_entangled(&model.diag, &model.phase)?, g);
    match model.f {
        0.0 => sep(),
        1.0 => pure(),
        f => CoincidenceMap::combine(f, &pure()?, 1.0 - f, &sep()?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::EnergyGrid;
    use std::sync::Arc;

    fn diag() -> CoincidenceMap {
        let g = EnergyGrid::new(-10.8, 1.2, 3, 18).unwrap();
        CoincidenceMap::from_fn(g, |a, b| {
            let blob = |x: f64, y: f64| (-(x * x + y * y) / (2.0 * 0.35f64.powi(2))).exp();
            let v = blob(a - 0.75, b + 0.75) + blob(a + 0.75, b - 0.75);
            if v < 1e-12 { 0.0 } else { v }
        })
        .unwrap()
        .normalized()
        .unwrap()
    }

    #[test]
    fn modulus_is_the_diagonal() {
        let d = diag();
        let psi = build_entangled(&d, &PhaseParams::new(0.91, 0.01, -0.04)).unwrap();
        assert!(psi.probability().sup_distance(&d) < 1e-12);
        let real = build_entangled(&d, &PhaseParams::default()).unwrap();
        assert!(real.amplitudes().iter().all(|a| a.im == 0.0 && a.re >= 0.0));
    }

    #[test]
    fn endpoints_and_affinity() {
        let d = diag();
        let c = Coupling::new(0.98).unwrap();
        let phase = PhaseParams::new(0.91, 0.01, -0.04);
        let at = |f: f64| blend(&EntanglementModel::new(f, d.clone(), phase.clone()).unwrap(), &c).unwrap();
        let (b0, b1) = (at(0.0), at(1.0));
        assert_eq!(b0, coincidence_separable(&d, &c).unwrap());
        assert_eq!(b1, coincidence_pure(&build_entangled(&d, &phase).unwrap(), &c).unwrap());
        let mid = at(0.3);
        let lin = CoincidenceMap::combine(0.3, &b1, 0.7, &b0).unwrap();
        assert_eq!(mid, lin);
    }

    #[test]
    fn sum_phase_does_not_matter() {
        let d = diag();
        let c = Coupling::new(1.33).unwrap();
        let base = PhaseParams::new(0.91, 0.01, -0.04);
        let with_g = base.clone().with_sum_phase(Arc::new(|s| 0.7 * s * s - 1.3 * s));
        let m0 = blend(&EntanglementModel::new(1.0, d.clone(), base).unwrap(), &c).unwrap();
        let m1 = blend(&EntanglementModel::new(1.0, d, with_g).unwrap(), &c).unwrap();
        assert!(m0.sup_distance(&m1) < 1e-9);
    }

    #[test]
    fn validates_model() {
        assert!(EntanglementModel::new(1.2, diag(), PhaseParams::default()).is_err());
        let unnorm = CoincidenceMap::new(*diag().grid(), diag().values() * 2.0).unwrap();
        assert!(EntanglementModel::new(0.5, unnorm, PhaseParams::default()).is_err());
    }
}
