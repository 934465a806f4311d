use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::{Dataset, FitParams};
use crate::error::{invalid, Result};
use crate::grid::{blur, CoincidenceMap};
use crate::state::{build_entangled, PhaseParams};
use crate::walk::{average_over_coupling, coincidence_pure, coincidence_separable, Coupling, CouplingSpread};

type Cache<K> = Mutex<HashMap<K, Arc<CoincidenceMap>>>;

const CACHE_LIMIT: usize = 256;

/// Forward model `blur(avg_g(blend(model, g)), sigma)` for one reference map.
///
/// The coupling average is linear, so it is taken separately over the pure and
/// separable parts; these are cached so that changing only `f` or `sigma`
/// costs one blend and one blur.
pub struct ForwardModel {
    reference: CoincidenceMap,
    nodes: usize,
    pure: Cache<[u64; 5]>,
    separable: Cache<[u64; 2]>,
}

impl std::fmt::Debug for ForwardModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ForwardModel").field("nodes", &self.nodes).finish_non_exhaustive()
    }
}

fn cached<K: std::hash::Hash + Eq>(
    cache: &Cache<K>,
    key: K,
    make: impl FnOnce() -> Result<CoincidenceMap>,
) -> Result<Arc<CoincidenceMap>> {
    if let Some(m) = cache.lock().expect("cache lock").get(&key) {
        return Ok(Arc::clone(m));
    }
    let m = Arc::new(make()?);
    let mut c = cache.lock().expect("cache lock");
    if c.len() >= CACHE_LIMIT {
        c.clear();
    }
    c.insert(key, Arc::clone(&m));
    Ok(m)
}

impl ForwardModel {
    pub fn new(reference: CoincidenceMap) -> Result<Self> {
        Self::with_nodes(reference, CouplingSpread::DEFAULT_NODES)
    }

    pub fn with_nodes(reference: CoincidenceMap, nodes: usize) -> Result<Self> {
        if !reference.is_normalized() {
            return Err(invalid(format!("reference map has mass {}, expected 1", reference.mass())));
        }
        reference.ensure_nonnegative()?;
        CouplingSpread::new(0.0, nodes)?;
        Ok(Self { reference, nodes, pure: Mutex::default(), separable: Mutex::default() })
    }

    pub fn reference(&self) -> &CoincidenceMap {
        &self.reference
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Coupling-averaged map of the entangled pure state.
    pub fn averaged_pure(&self, phase: &PhaseParams, g: f64, ratio: f64) -> Result<Arc<CoincidenceMap>> {
        let key = [phase.alpha, phase.beta, phase.gamma, g, ratio].map(f64::to_bits);
        cached(&self.pure, key, || {
            let psi = build_entangled(&self.reference, phase)?;
            let spread = CouplingSpread::new(ratio, self.nodes)?;
            average_over_coupling(|ge| coincidence_pure(&psi, &Coupling::new(ge)?), g, &spread)
        })
    }

    /// Coupling-averaged map of the same-diagonal separable state.
    pub fn averaged_separable(&self, g: f64, ratio: f64) -> Result<Arc<CoincidenceMap>> {
        cached(&self.separable, [g.to_bits(), ratio.to_bits()], || {
            let spread = CouplingSpread::new(ratio, self.nodes)?;
            average_over_coupling(|ge| coincidence_separable(&self.reference, &Coupling::new(ge)?), g, &spread)
        })
    }

    /// Predicted map for observation `index`.
    pub fn map(&self, params: &FitParams, index: usize) -> Result<CoincidenceMap> {
        params.validate()?;
        self.map_extended(params, index)
    }

    /// Same model continued past the parameter bounds: affine in `f` for any
    /// real `f`, and even in `sigma` and `ratio`. Used for finite differences
    /// at the edge of the feasible box.
    pub(crate) fn map_extended(&self, params: &FitParams, index: usize) -> Result<CoincidenceMap> {
        let g = *params
            .g
            .get(index)
            .ok_or_else(|| invalid(format!("no coupling for observation {index}")))?;
        let phase = PhaseParams::new(params.alpha, params.beta, params.gamma);
        let f = params.f;
        let ratio = params.ratio.abs();
        let mixed = if f == 0.0 {
            (*self.averaged_separable(g, ratio)?).clone()
        } else if f == 1.0 {
            (*self.averaged_pure(&phase, g, ratio)?).clone()
        } else {
            let pure = self.averaged_pure(&phase, g, ratio)?;
            let sep = self.averaged_separable(g, ratio)?;
            CoincidenceMap::combine(f, &pure, 1.0 - f, &sep)?
        };
        blur(&mixed, params.sigma.abs())
    }

    /// Sum of squared residuals over every observation and bin.
    pub fn loss(&self, params: &FitParams, dataset: &Dataset) -> Result<f64> {
        params.validate()?;
        self.loss_extended(params, dataset)
    }

    pub(crate) fn loss_extended(&self, params: &FitParams, dataset: &Dataset) -> Result<f64> {
        if params.g.len() != dataset.len() {
            return Err(invalid(format!(
                "{} couplings for {} observations",
                params.g.len(),
                dataset.len()
            )));
        }
        let mut r = 0.0;
        for (i, o) in dataset.observations().iter().enumerate() {
            let m = self.map_extended(params, i)?;
            r += (m.values() - o.map.values()).iter().map(|d| d * d).sum::<f64>();
        }
        Ok(r)
    }

    /// Residual vector `forward - observed`, observations concatenated row-major.
    pub fn residual_vector(&self, params: &FitParams, dataset: &Dataset) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(dataset.n_data());
        for (i, o) in dataset.observations().iter().enumerate() {
            let m = self.map(params, i)?;
            out.extend(m.values().iter().zip(o.map.values()).map(|(a, b)| a - b));
        }
        Ok(out)
    }
}

/// Predicted map for observation `power_index` with the default quadrature.
pub fn forward(params: &FitParams, reference: &CoincidenceMap, power_index: usize) -> Result<CoincidenceMap> {
    ForwardModel::new(reference.clone())?.map(params, power_index)
}

/// `-sum (forward - observed)^2` over all observations and bins.
pub fn log_likelihood(params: &FitParams, dataset: &Dataset) -> Result<f64> {
    Ok(-ForwardModel::new(dataset.reference().clone())?.loss(params, dataset)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::EnergyGrid;
    use crate::state::{blend, EntanglementModel};
    use crate::synth::PairTemplate;
    use crate::tomography::Observation;

    fn reference() -> CoincidenceMap {
        let g = EnergyGrid::new(-12.0, 1.2, 3, 20).unwrap();
        PairTemplate::default().reference(g).unwrap()
    }

    fn params() -> FitParams {
        FitParams { f: 0.18, alpha: 0.91, beta: 0.01, gamma: -0.04, g: vec![0.56, 0.98], sigma: 0.16, ratio: 0.48 }
    }

    #[test]
    fn degenerate_layers_give_separable_map() {
        let r = reference();
        let p = FitParams { f: 0.0, sigma: 0.0, ratio: 0.0, ..params() };
        let m = forward(&p, &r, 1).unwrap();
        assert_eq!(m, coincidence_separable(&r, &Coupling::new(0.98).unwrap()).unwrap());
    }

    #[test]
    fn matches_literal_composition() {
        let r = reference();
        let p = params();
        let model = EntanglementModel::new(p.f, r.clone(), PhaseParams::new(p.alpha, p.beta, p.gamma)).unwrap();
        let spread = CouplingSpread::new(p.ratio, 33).unwrap();
        let avg = average_over_coupling(|g| blend(&model, &Coupling::new(g)?), p.g[0], &spread).unwrap();
        let literal = blur(&avg, p.sigma).unwrap();
        assert!(forward(&p, &r, 0).unwrap().sup_distance(&literal) < 1e-12);
    }

    #[test]
    fn affine_in_f() {
        let fm = ForwardModel::new(reference()).unwrap();
        let at = |f: f64| fm.map(&FitParams { f, ..params() }, 0).unwrap();
        let mid = CoincidenceMap::combine(0.5, &at(0.0), 0.5, &at(1.0)).unwrap();
        assert!(at(0.5).sup_distance(&mid) < 1e-10);
    }

    #[test]
    fn likelihood_is_minus_squared_residual() {
        let r = reference();
        let p = params();
        let fm = ForwardModel::new(r.clone()).unwrap();
        let obs: Vec<Observation> = (0..2)
            .map(|i| Observation { label: format!("{i}"), power_mw: i as f64, map: fm.map(&p, i).unwrap() })
            .collect();
        let ds = Dataset::new(r.clone(), obs.clone()).unwrap();
        assert_eq!(log_likelihood(&p, &ds).unwrap(), 0.0);
        let mut bumped = obs;
        let mut v = bumped[1].map.values().clone();
        v[(20, 25)] += 0.01;
        bumped[1].map = CoincidenceMap::new(*r.grid(), v).unwrap();
        let ds = Dataset::new(r, bumped).unwrap();
        assert!((log_likelihood(&p, &ds).unwrap() + 1e-4).abs() < 1e-15);
    }

    #[test]
    fn loss_checks_coupling_count() {
        let r = reference();
        let fm = ForwardModel::new(r.clone()).unwrap();
        let obs = vec![Observation { label: "a".into(), power_mw: 1.0, map: r.clone() }];
        let ds = Dataset::new(r, obs).unwrap();
        assert!(fm.loss(&params(), &ds).is_err());
    }
}
