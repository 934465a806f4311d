use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use ndarray::Array1;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::{format, EnergyGrid, PairWavefunction, Spectrum1D};

/// How many Schmidt modes to keep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SchmidtCutoff {
    /// The `n` largest modes.
    Rank(usize),
    /// Every mode with `lambda_n > tol`.
    Tolerance(f64),
}

/// `psi(E1, E2) = sum_n sqrt(lambda_n) psi_n^A(E1) psi_n^B(E2)`.
///
/// `lambda` is nonincreasing and normalized over all modes of `psi`, so it sums
/// to `retained()` after truncation. Modes are orthonormal under the grid
/// measure `sum_i conj(a_i) b_i delta`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    grid: EnergyGrid,
    lambdas: Vec<f64>,
    modes_a: Vec<Array1<Complex64>>,
    modes_b: Vec<Array1<Complex64>>,
}

impl SchmidtDecomposition {
    pub fn grid(&self) -> &EnergyGrid {
        &self.grid
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Coefficients rescaled to sum to one over the kept modes.
    pub fn normalized_lambdas(&self) -> Vec<f64> {
        let s = self.retained();
        self.lambdas.iter().map(|l| l / s).collect()
    }

    pub fn retained(&self) -> f64 {
        self.lambdas.iter().sum()
    }

    pub fn rank(&self) -> usize {
        self.lambdas.len()
    }

    pub fn modes_a(&self) -> &[Array1<Complex64>] {
        &self.modes_a
    }

    pub fn modes_b(&self) -> &[Array1<Complex64>] {
        &self.modes_b
    }

    /// Amplitude table rebuilt from the kept modes.
    pub fn reconstruct(&self) -> ndarray::Array2<Complex64> {
        let n = self.grid.n_bins();
        let mut out = ndarray::Array2::<Complex64>::zeros((n, n));
        for ((l, a), b) in self.lambdas.iter().zip(&self.modes_a).zip(&self.modes_b) {
            let s = l.sqrt();
            for i in 0..n {
                let ai = a[i] * s;
                if ai == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += ai * b[j];
                }
            }
        }
        out
    }

    /// Writes `lambdas.txt` and one real and one imaginary table per mode
    /// (`a<n>_re.txt`, `a<n>_im.txt`, `b<n>_re.txt`, `b<n>_im.txt`) into `dir`.
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut text = String::from("# n lambda\n");
        for (n, l) in self.lambdas.iter().enumerate() {
            writeln!(text, "{n} {l:.16e}").expect("string write");
        }
        std::fs::write(dir.join("lambdas.txt"), text)?;
        for (tag, modes) in [("a", &self.modes_a), ("b", &self.modes_b)] {
            for (n, m) in modes.iter().enumerate() {
                let re = Spectrum1D::new(self.grid, m.mapv(|z| z.re))?;
                let im = Spectrum1D::new(self.grid, m.mapv(|z| z.im))?;
                format::write_spectrum(dir.join(format!("{tag}{n}_re.txt")), &re)?;
                format::write_spectrum(dir.join(format!("{tag}{n}_im.txt")), &im)?;
            }
        }
        Ok(())
    }
}

pub fn schmidt(psi: &PairWavefunction, cutoff: SchmidtCutoff) -> Result<SchmidtDecomposition> {
    match cutoff {
        SchmidtCutoff::Rank(0) => return Err(invalid("Schmidt rank cutoff must be at least 1")),
        SchmidtCutoff::Tolerance(t) if !(t >= 0.0) => {
            return Err(invalid(format!("Schmidt tolerance must be >= 0, got {t}")))
        }
        _ => {}
    }
    let grid = *psi.grid();
    let n = grid.n_bins();
    let amps = psi.amplitudes();
    let m = DMatrix::from_fn(n, n, |i, j| amps[(i, j)]);
    let svd = m.svd(true, true);
    let u = svd.u.ok_or_else(|| Error::Numerical("SVD did not return U".into()))?;
    let vt = svd.v_t.ok_or_else(|| Error::Numerical("SVD did not return V^H".into()))?;
    let d = grid.delta();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let raw: Vec<f64> = order.iter().map(|&c| (svd.singular_values[c] * d).powi(2)).collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Numerical("wavefunction has zero norm".into()));
    }
    let keep = match cutoff {
        SchmidtCutoff::Rank(r) => r.min(raw.len()),
        SchmidtCutoff::Tolerance(t) => raw.iter().filter(|&&l| l / total > t).count().max(1),
    };
    let scale = 1.0 / d.sqrt();
    let mut lambdas = Vec::with_capacity(keep);
    let mut modes_a = Vec::with_capacity(keep);
    let mut modes_b = Vec::with_capacity(keep);
    for (&c, l) in order.iter().zip(&raw).take(keep) {
        lambdas.push(l / total);
        modes_a.push(Array1::from_shape_fn(n, |i| u[(i, c)] * scale));
        modes_b.push(Array1::from_shape_fn(n, |j| vt[(c, j)] * scale));
    }
    Ok(SchmidtDecomposition { grid, lambdas, modes_a, modes_b })
}
