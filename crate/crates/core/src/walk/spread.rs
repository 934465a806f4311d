use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Result};
use crate::grid::CoincidenceMap;

/// Spread of the effective coupling caused by the finite electron pulse
/// sampling a Gaussian laser envelope.
///
/// An arrival time `t ~ N(0, sigma_el^2)` sees `g_eff = g exp(-t^2 / (2 sigma_laser^2))`;
/// `ratio = sigma_el / sigma_laser`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSpread {
    ratio: f64,
    nodes: usize,
}

impl Default for CouplingSpread {
    fn default() -> Self {
        Self { ratio: 0.0, nodes: Self::DEFAULT_NODES }
    }
}

impl CouplingSpread {
    pub const DEFAULT_NODES: usize = 33;

    pub fn new(ratio: f64, nodes: usize) -> Result<Self> {
        if !(ratio >= 0.0) || !ratio.is_finite() {
            return Err(invalid(format!("spread ratio must be >= 0, got {ratio}")));
        }
        if nodes == 0 {
            return Err(invalid("quadrature needs at least one node"));
        }
        Ok(Self { ratio, nodes })
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Distinct `(g_eff, weight)` pairs of the `nodes`-point Gauss-Hermite
    /// rule for the standard normal arrival time. Mirror nodes give the same
    /// `g_eff` and are merged.
    pub fn couplings(&self, nominal: f64) -> Vec<(f64, f64)> {
        if self.ratio == 0.0 {
            return vec![(nominal, 1.0)];
        }
        let (t, w) = gauss_hermite(self.nodes);
        let n = self.nodes;
        let mut out = Vec::with_capacity(n / 2 + 1);
        for j in 0..n / 2 {
            let g = nominal * (-0.5 * (self.ratio * t[j]).powi(2)).exp();
            out.push((g, w[j] + w[n - 1 - j]));
        }
        if n % 2 == 1 {
            out.push((nominal, w[n / 2]));
        }
        out
    }

    /// Mean and standard deviation of `g_eff / g` under the quadrature.
    pub fn relative_moments(&self) -> (f64, f64) {
        let nodes = self.couplings(1.0);
        let mean: f64 = nodes.iter().map(|(g, w)| g * w).sum();
        let var: f64 = nodes.iter().map(|(g, w)| w * (g - mean).powi(2)).sum();
        (mean, var.sqrt())
    }
}

/// Nodes (ascending) and weights of the Gauss-Hermite rule for the weight
/// `exp(-t^2/2) / sqrt(2 pi)`, from the eigenvectors of the Jacobi matrix.
fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jac = DMatrix::zeros(n, n);
    for k in 1..n {
        let b = (k as f64).sqrt();
        jac[(k - 1, k)] = b;
        jac[(k, k - 1)] = b;
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // symmetrize against round-off
    for j in 0..n / 2 {
        let (a, b) = (pairs[j], pairs[n - 1 - j]);
        let t = 0.5 * (b.0 - a.0);
        let w = 0.5 * (a.1 + b.1);
        pairs[j] = (-t, w);
        pairs[n - 1 - j] = (t, w);
    }
    if n % 2 == 1 {
        pairs[n / 2].0 = 0.0;
    }
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    pairs.into_iter().map(|(t, w)| (t, w / total)).unzip()
}

/// Average of `model(g_eff)` over the coupling distribution around
/// `nominal_g`. Both electrons see the same `g_eff` at each node.
pub fn average_over_coupling<F>(mut model: F, nominal_g: f64, spread: &CouplingSpread) -> Result<CoincidenceMap>
where
    F: FnMut(f64) -> Result<CoincidenceMap>,
{
    if !(nominal_g > 0.0) {
        return Err(invalid(format!("nominal coupling must be positive, got {nominal_g}")));
    }
    if spread.ratio == 0.0 {
        return model(nominal_g);
    }
    let mut nodes = spread.couplings(nominal_g).into_iter();
    let (g0, w0) = nodes.next().expect("at least one node");
    let first = model(g0)?;
    let grid = *first.grid();
    let mut acc = first.into_values() * w0;
    for (g, w) in nodes {
        let m = model(g)?;
        grid.ensure_compatible(m.grid())?;
        acc.scaled_add(w, m.values());
    }
    Ok(CoincidenceMap::from_parts_unchecked(grid, acc))
}
