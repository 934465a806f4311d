use super::{Dataset, FitParams, FitResult, ForwardModel};
use crate::error::Result;
use crate::grid::CoincidenceMap;

/// Fraction of the separable prediction removed in the subtraction diagnostic.
const SEPARABLE_FRACTION: f64 = 0.75;

#[derive(Debug, Clone)]
pub struct Residuals {
    /// `observed - forward(params)` per observation.
    pub per_observation: Vec<CoincidenceMap>,
    /// `observed - 0.75 forward(params with f = 0)` per observation.
    pub minus_separable: Vec<CoincidenceMap>,
}

pub fn residuals(result: &FitResult, dataset: &Dataset) -> Result<Residuals> {
    residuals_for(&result.params, dataset, result.nodes)
}

pub(crate) fn residuals_for(params: &FitParams, dataset: &Dataset, nodes: usize) -> Result<Residuals> {
    let model = ForwardModel::with_nodes(dataset.reference().clone(), nodes)?;
    let separable = FitParams { f: 0.0, ..params.clone() };
    let mut per_observation = Vec::with_capacity(dataset.len());
    let mut minus_separable = Vec::with_capacity(dataset.len());
    for (i, o) in dataset.observations().iter().enumerate() {
        let m = model.map(params, i)?;
        per_observation.push(CoincidenceMap::combine(1.0, &o.map, -1.0, &m)?);
        let s = model.map(&separable, i)?;
        minus_separable.push(CoincidenceMap::combine(1.0, &o.map, -SEPARABLE_FRACTION, &s)?);
    }
    Ok(Residuals { per_observation, minus_separable })
}
