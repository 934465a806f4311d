use ndarray::{Array1, Array2, Axis, Zip};
use num_complex::Complex64;

use super::EnergyGrid;
use crate::error::{invalid, Error, Result};

const NORM_TOL: f64 = 1e-9;

/// One-electron energy spectrum. Values are densities in 1/eV.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum1D {
    grid: EnergyGrid,
    values: Array1<f64>,
}

/// Two-electron coincidence map `P(E1, E2)`, densities in 1/eV².
///
/// Row index is the bin of the first electron, column the second.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceMap {
    grid: EnergyGrid,
    values: Array2<f64>,
}

/// Complex pair amplitude `psi(E1, E2)` with `sum |psi|^2 delta^2 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairWavefunction {
    grid: EnergyGrid,
    amplitudes: Array2<Complex64>,
}

fn check_finite<'a>(mut it: impl Iterator<Item = &'a f64>) -> Result<()> {
    if it.all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(invalid("values must be finite"))
    }
}

/// Translate `src` by `(s1, s2)` bins, zero-filling.
pub(crate) fn shift2<T: Copy + Default>(src: &Array2<T>, s1: isize, s2: isize) -> Array2<T> {
    let (n1, n2) = src.dim();
    let mut out = Array2::from_elem((n1, n2), T::default());
    for i in 0..n1 {
        let si = i as isize - s1;
        if si < 0 || si >= n1 as isize {
            continue;
        }
        for j in 0..n2 {
            let sj = j as isize - s2;
            if sj < 0 || sj >= n2 as isize {
                continue;
            }
            out[(i, j)] = src[(si as usize, sj as usize)];
        }
    }
    out
}

impl Spectrum1D {
    pub fn new(grid: EnergyGrid, values: Array1<f64>) -> Result<Self> {
        if values.len() != grid.n_bins() {
            return Err(invalid(format!(
                "spectrum has {} values for {} bins",
                values.len(),
                grid.n_bins()
            )));
        }
        check_finite(values.iter())?;
        Ok(Self { grid, values })
    }

    /// Spectrum whose value at each bin is `f(energy)`.
    pub fn from_fn(grid: EnergyGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.energies().map(f).collect();
        Self::new(grid, values)
    }

    /// Unit-mass spike at bin `i`.
    pub fn delta_at(grid: EnergyGrid, i: usize) -> Self {
        let mut values = Array1::zeros(grid.n_bins());
        values[i] = 1.0 / grid.delta();
        Self { grid, values }
    }

    pub fn grid(&self) -> &EnergyGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array1<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array1<f64> {
        self.values
    }

    /// Integral `sum values * delta`.
    pub fn mass(&self) -> f64 {
        self.values.sum() * self.grid.delta()
    }

    pub fn is_normalized(&self) -> bool {
        (self.mass() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let m = self.mass();
        if !(m > 0.0) {
            return Err(invalid("cannot normalize a spectrum with nonpositive mass"));
        }
        Ok(Self { grid: self.grid, values: &self.values / m })
    }

    pub fn mean(&self) -> f64 {
        let d = self.grid.delta();
        self.grid.energies().zip(self.values.iter()).map(|(e, v)| e * v * d).sum::<f64>()
            / self.mass()
    }

    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        let d = self.grid.delta();
        self.grid
            .energies()
            .zip(self.values.iter())
            .map(|(e, v)| (e - mu).powi(2) * v * d)
            .sum::<f64>()
            / self.mass()
    }

    /// Move the spectrum up by `n` photon energies; bins shifted in from
    /// outside the grid are zero.
    pub fn shift_by_photons(&self, n: i64) -> Self {
        let s = n as isize * self.grid.k() as isize;
        let len = self.values.len() as isize;
        let values = (0..len)
            .map(|i| {
                let src = i - s;
                if (0..len).contains(&src) {
                    self.values[src as usize]
                } else {
                    0.0
                }
            })
            .collect();
        Self { grid: self.grid, values }
    }
}

impl CoincidenceMap {
    pub fn new(grid: EnergyGrid, values: Array2<f64>) -> Result<Self> {
        let n = grid.n_bins();
        if values.dim() != (n, n) {
            return Err(invalid(format!("map has shape {:?}, expected ({n}, {n})", values.dim())));
        }
        check_finite(values.iter())?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: EnergyGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let n = grid.n_bins();
        let values = Array2::from_shape_fn((n, n), |(i, j)| f(grid.energy(i), grid.energy(j)));
        Self::new(grid, values)
    }

    pub fn zeros(grid: EnergyGrid) -> Self {
        let n = grid.n_bins();
        Self { grid, values: Array2::zeros((n, n)) }
    }

    /// Unit-mass spike at bins `(i, j)`.
    pub fn delta_at(grid: EnergyGrid, i: usize, j: usize) -> Self {
        let mut map = Self::zeros(grid);
        map.values[(i, j)] = 1.0 / (grid.delta() * grid.delta());
        map
    }

    /// Product map `a(E1) b(E2)`.
    pub fn outer(a: &Spectrum1D, b: &Spectrum1D) -> Result<Self> {
        a.grid.ensure_compatible(&b.grid)?;
        let n = a.grid.n_bins();
        let values = Array2::from_shape_fn((n, n), |(i, j)| a.values[i] * b.values[j]);
        Ok(Self { grid: a.grid, values })
    }

    pub(crate) fn from_parts_unchecked(grid: EnergyGrid, values: Array2<f64>) -> Self {
        debug_assert_eq!(values.dim(), (grid.n_bins(), grid.n_bins()));
        Self { grid, values }
    }

    pub fn grid(&self) -> &EnergyGrid {
        &self.grid
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    /// Integral `sum values * delta^2`.
    pub fn mass(&self) -> f64 {
        let d = self.grid.delta();
        self.values.sum() * d * d
    }

    pub fn is_normalized(&self) -> bool {
        (self.mass() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let m = self.mass();
        if !(m > 0.0) {
            return Err(invalid("cannot normalize a map with nonpositive mass"));
        }
        Ok(Self { grid: self.grid, values: &self.values / m })
    }

    pub(crate) fn ensure_nonnegative(&self) -> Result<()> {
        for ((row, col), &value) in self.values.indexed_iter() {
            if value < 0.0 {
                return Err(Error::NegativeProbability { value, row, col });
            }
        }
        Ok(())
    }

    pub fn shift_by_photons(&self, n1: i64, n2: i64) -> Self {
        let k = self.grid.k() as isize;
        Self { grid: self.grid, values: shift2(&self.values, n1 as isize * k, n2 as isize * k) }
    }

    /// Marginal density of electron 1 (`axis = 0`) or electron 2 (`axis = 1`).
    pub fn marginal(&self, axis: usize) -> Spectrum1D {
        let other = if axis == 0 { Axis(1) } else { Axis(0) };
        let values = self.values.sum_axis(other) * self.grid.delta();
        Spectrum1D { grid: self.grid, values }
    }

    /// Exchange the roles of the two electrons.
    pub fn transposed(&self) -> Self {
        Self { grid: self.grid, values: self.values.t().to_owned() }
    }

    /// Largest absolute bin difference.
    pub fn sup_distance(&self, other: &CoincidenceMap) -> f64 {
        Zip::from(&self.values)
            .and(&other.values)
            .fold(0.0_f64, |m, a, b| m.max((a - b).abs()))
    }

    /// `a * x + b * y`, bin by bin.
    pub fn combine(a: f64, x: &CoincidenceMap, b: f64, y: &CoincidenceMap) -> Result<Self> {
        x.grid.ensure_compatible(&y.grid)?;
        let values = Zip::from(&x.values).and(&y.values).map_collect(|&u, &v| a * u + b * v);
        Ok(Self { grid: x.grid, values })
    }
}

impl PairWavefunction {
    /// Amplitude table; fails unless it has unit norm within 1e-9.
    pub fn new(grid: EnergyGrid, amplitudes: Array2<Complex64>) -> Result<Self> {
        let psi = Self::unnormalized(grid, amplitudes)?;
        let norm = psi.norm_sq();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(invalid(format!("wavefunction norm is {norm}, expected 1")));
        }
        Ok(psi)
    }

    /// Amplitude table scaled to unit norm.
    pub fn from_unnormalized(grid: EnergyGrid, amplitudes: Array2<Complex64>) -> Result<Self> {
        let psi = Self::unnormalized(grid, amplitudes)?;
        let norm = psi.norm_sq();
        if !(norm > 0.0) {
            return Err(invalid("wavefunction is identically zero"));
        }
        let scale = 1.0 / norm.sqrt();
        Ok(Self { grid, amplitudes: psi.amplitudes.mapv(|a| a * scale) })
    }

    fn unnormalized(grid: EnergyGrid, amplitudes: Array2<Complex64>) -> Result<Self> {
        let n = grid.n_bins();
        if amplitudes.dim() != (n, n) {
            return Err(invalid(format!(
                "amplitudes have shape {:?}, expected ({n}, {n})",
                amplitudes.dim()
            )));
        }
        if !amplitudes.iter().all(|a| a.re.is_finite() && a.im.is_finite()) {
            return Err(invalid("amplitudes must be finite"));
        }
        Ok(Self { grid, amplitudes })
    }

    pub(crate) fn from_parts_unchecked(grid: EnergyGrid, amplitudes: Array2<Complex64>) -> Self {
        Self { grid, amplitudes }
    }

    /// Pair in the energy eigenstate `|E_i, E_j>` of the grid.
    pub fn eigenstate(grid: EnergyGrid, i: usize, j: usize) -> Self {
        let n = grid.n_bins();
        let mut amplitudes = Array2::zeros((n, n));
        amplitudes[(i, j)] = Complex64::new(1.0 / grid.delta(), 0.0);
        Self { grid, amplitudes }
    }

    pub fn grid(&self) -> &EnergyGrid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &Array2<Complex64> {
        &self.amplitudes
    }

    /// `sum |psi|^2 delta^2`.
    pub fn norm_sq(&self) -> f64 {
        let d = self.grid.delta();
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * d * d
    }

    /// Coincidence map `|psi|^2`.
    pub fn probability(&self) -> CoincidenceMap {
        CoincidenceMap {
            grid: self.grid,
            values: self.amplitudes.mapv(|a| a.norm_sqr()),
        }
    }

    /// Translate by `(n1, n2)` photons. The result may lose norm at the edges.
    pub fn shift_by_photons(&self, n1: i64, n2: i64) -> Self {
        let k = self.grid.k() as isize;
        Self {
            grid: self.grid,
            amplitudes: shift2(&self.amplitudes, n1 as isize * k, n2 as isize * k),
        }
    }

    /// Multiply every amplitude by `exp(i theta(i, j))`.
    pub fn with_phase(&self, theta: impl Fn(usize, usize) -> f64) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        for ((i, j), a) in amplitudes.indexed_iter_mut() {
            *a *= Complex64::from_polar(1.0, theta(i, j));
        }
        Self { grid: self.grid, amplitudes }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid() -> EnergyGrid {
        EnergyGrid::new(-6.0, 1.2, 4, 10).unwrap()
    }

    #[test]
    fn delta_shift_moves_one_photon() {
        let g = grid();
        let zero = g.index_of(0.0).unwrap();
        let map = CoincidenceMap::delta_at(g, zero, zero);
        let shifted = map.shift_by_photons(1, 0);
        let up = g.index_of(1.2).unwrap();
        assert_eq!(shifted, CoincidenceMap::delta_at(g, up, zero));
        assert_eq!(map.shift_by_photons(0, 0), map);
    }

    #[test]
    fn shift_past_edge_is_zero() {
        let g = grid();
        let map = CoincidenceMap::delta_at(g, g.n_bins() - 2, 3);
        let gone = map.shift_by_photons(20, 0);
        assert!(gone.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn normalization_uses_bin_width() {
        let g = grid();
        let s = Spectrum1D::delta_at(g, 5);
        assert!((s.mass() - 1.0).abs() < 1e-12);
        let m = CoincidenceMap::delta_at(g, 5, 7);
        assert!(m.is_normalized());
        let psi = PairWavefunction::eigenstate(g, 5, 7);
        assert!((psi.norm_sq() - 1.0).abs() < 1e-12);
        let peak = psi.probability().values()[(5, 7)];
        assert!((peak * g.delta() * g.delta() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_wrong_shape_and_norm() {
        let g = grid();
        assert!(CoincidenceMap::new(g, Array2::zeros((3, 3))).is_err());
        assert!(PairWavefunction::new(g, Array2::zeros((41, 41))).is_err());
        assert!(PairWavefunction::from_unnormalized(g, Array2::zeros((41, 41))).is_err());
    }

    proptest! {
        #[test]
        fn photon_shift_round_trip(n1 in -3i64..=3, n2 in -3i64..=3, seed in 0u64..1000) {
            let g = grid();
            let k = g.k();
            let n = g.n_bins();
            // support at least 3 photons away from both edges
            let lo = 3 * k;
            let hi = n - 3 * k;
            let values = Array2::from_shape_fn((n, n), |(i, j)| {
                if (lo..hi).contains(&i) && (lo..hi).contains(&j) {
                    ((i * 31 + j * 17) as u64 ^ seed) as f64 % 7.0 + 0.5
                } else {
                    0.0
                }
            });
            let map = CoincidenceMap::new(g, values).unwrap();
            let back = map.shift_by_photons(n1, n2).shift_by_photons(-n1, -n2);
            prop_assert_eq!(back, map);
        }
    }
}
