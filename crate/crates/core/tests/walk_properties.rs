use pairwalk::state::{build_entangled, PhaseParams};
use pairwalk::walk::{
    coincidence_classical, coincidence_mixed, coincidence_pure, coincidence_separable, walk_1e,
};
use pairwalk::{CoincidenceMap, Coupling, EnergyGrid, PairWavefunction, Spectrum1D};
use proptest::prelude::*;

fn grid() -> EnergyGrid {
    EnergyGrid::new(-12.0, 1.2, 2, 20).unwrap()
}

/// Random smooth symmetric blob pair near the center of the grid.
fn pair_map(c: f64, w: f64, skew: f64) -> CoincidenceMap {
    CoincidenceMap::from_fn(grid(), |a, b| {
        let blob = |x: f64, y: f64| (-((x - c).powi(2) + (y + c).powi(2)) / (2.0 * w * w)).exp();
        blob(a, b) + blob(b, a) + skew * (-(a * a + b * b) / (2.0 * w * w)).exp()
    })
    .unwrap()
    .normalized()
    .unwrap()
}

fn max_asymmetry(m: &CoincidenceMap) -> f64 {
    let v = m.values();
    let peak = v.iter().cloned().fold(0.0, f64::max);
    v.indexed_iter().map(|((i, j), x)| (x - v[(j, i)]).abs()).fold(0.0, f64::max) / peak
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn every_model_conserves_mass_and_symmetry(
        c in 0.0f64..1.5, w in 0.3f64..0.8, skew in 0.0f64..1.0,
        g in 0.05f64..1.2, alpha in -2.0f64..2.0, bg in -0.3f64..0.3,
    ) {
        let p0 = pair_map(c, w, skew);
        let g = Coupling::new(g).unwrap();
        let psi = build_entangled(&p0, &PhaseParams::new(alpha, bg, bg)).unwrap();
        let outs = [
            coincidence_separable(&p0, &g).unwrap(),
            coincidence_classical(&p0, &g).unwrap(),
            coincidence_pure(&psi, &g).unwrap(),
            coincidence_mixed(&[(0.4, psi.clone()), (0.6, build_entangled(&p0, &PhaseParams::default()).unwrap())], &g)
                .unwrap(),
        ];
        for m in &outs {
            prop_assert!((m.mass() - 1.0).abs() < 1e-8, "mass {}", m.mass());
            prop_assert!(max_asymmetry(m) < 1e-10, "asymmetry {}", max_asymmetry(m));
        }
        let s = p0.marginal(0);
        prop_assert!((walk_1e(&s, &g).unwrap().mass() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn zero_coupling_returns_inputs(c in 0.0f64..1.5, w in 0.3f64..0.8, alpha in -2.0f64..2.0) {
        let p0 = pair_map(c, w, 0.0);
        let zero = Coupling::new(0.0).unwrap();
        let psi = build_entangled(&p0, &PhaseParams::new(alpha, 0.0, 0.0)).unwrap();
        prop_assert_eq!(coincidence_separable(&p0, &zero).unwrap().into_values(), p0.values().clone());
        prop_assert_eq!(coincidence_classical(&p0, &zero).unwrap().into_values(), p0.values().clone());
        let pure = coincidence_pure(&psi, &zero).unwrap();
        prop_assert!(pure.sup_distance(&psi.probability()) == 0.0);
        let s = p0.marginal(1);
        prop_assert_eq!(walk_1e(&s, &zero).unwrap().into_values(), s.values().clone());
    }
}

#[test]
fn photon_eigenstate_mixture_is_separable() {
    let grid = EnergyGrid::new(-9.6, 1.2, 2, 16).unwrap();
    let spec = Spectrum1D::from_fn(grid, |e| if e.abs() < 2.5 { (-(e * e) / 0.5).exp() } else { 0.0 })
        .unwrap()
        .normalized()
        .unwrap();
    let p = CoincidenceMap::outer(&spec, &spec).unwrap();
    let g = Coupling::new(0.4).unwrap();
    let d2 = grid.delta().powi(2);
    let components: Vec<(f64, PairWavefunction)> = p
        .values()
        .indexed_iter()
        .filter(|(_, v)| **v > 0.0)
        .map(|((i, j), v)| (v * d2, PairWavefunction::eigenstate(grid, i, j)))
        .collect();
    let total: f64 = components.iter().map(|c| c.0).sum();
    let components: Vec<_> = components.into_iter().map(|(w, s)| (w / total, s)).collect();
    let mixed = coincidence_mixed(&components, &g).unwrap();
    let sep = coincidence_separable(&p, &g).unwrap();
    assert!(mixed.sup_distance(&sep) < 1e-9);
}
