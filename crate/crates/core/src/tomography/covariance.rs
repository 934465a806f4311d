use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Error, Result};

/// Finite-difference step `max(relative * |x|, absolute)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdSteps {
    pub relative: f64,
    pub absolute: f64,
}

impl Default for FdSteps {
    fn default() -> Self {
        Self { relative: 1e-4, absolute: 1e-6 }
    }
}

impl FdSteps {
    pub fn step(&self, x: f64) -> f64 {
        (self.relative * x.abs()).max(self.absolute)
    }
}

/// Parameter covariance of a least-squares minimum.
#[derive(Debug, Clone)]
pub struct Covariance {
    pub hessian: DMatrix<f64>,
    pub covariance: DMatrix<f64>,
    /// Two-standard-deviation errors.
    pub std_errors: Vec<f64>,
    /// Residual variance `r / (N - p)`.
    pub s2: f64,
    /// Set when the Hessian was not positive definite and a pseudo-inverse was used.
    pub pinv_warning: bool,
}

/// Covariance of the minimizer of a residual sum `r(x)` over `n_data` points.
///
/// The Hessian `h` of `r` is taken by central differences. With
/// `s^2 = r / (N - p)`, the covariance is `2 s^2 h^{-1}`: for `r = sum e^2`
/// the Hessian is twice the Gauss-Newton normal matrix.
pub fn covariance_from_objective<F>(mut objective: F, x: &[f64], n_data: usize, steps: FdSteps) -> Result<Covariance>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let p = x.len();
    if p == 0 {
        return Err(invalid("no free parameters"));
    }
    if n_data <= p {
        return Err(invalid(format!("need more data points ({n_data}) than parameters ({p})")));
    }
    let r0 = objective(x)?;
    let h: Vec<f64> = x.iter().map(|&v| steps.step(v)).collect();
    let mut eval = |d: &[(usize, f64)]| -> Result<f64> {
        let mut y = x.to_vec();
        for &(i, s) in d {
            y[i] += s;
        }
        objective(&y)
    };
    let mut hess = DMatrix::<f64>::zeros(p, p);
    let mut plus = vec![0.0; p];
    let mut minus = vec![0.0; p];
    for i in 0..p {
        plus[i] = eval(&[(i, h[i])])?;
        minus[i] = eval(&[(i, -h[i])])?;
        hess[(i, i)] = (plus[i] - 2.0 * r0 + minus[i]) / (h[i] * h[i]);
    }
    for i in 0..p {
        for j in i + 1..p {
            let pp = eval(&[(i, h[i]), (j, h[j])])?;
            let pm = eval(&[(i, h[i]), (j, -h[j])])?;
            let mp = eval(&[(i, -h[i]), (j, h[j])])?;
            let mm = eval(&[(i, -h[i]), (j, -h[j])])?;
            let v = (pp - pm - mp + mm) / (4.0 * h[i] * h[j]);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    if hess.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite Hessian".into()));
    }
    let s2 = r0 / (n_data - p) as f64;
    let (inv, pinv_warning) = match hess.clone().cholesky() {
        Some(c) => (c.inverse(), false),
        None => (pseudo_inverse(&hess), true),
    };
    let covariance = inv * (2.0 * s2);
    let covariance = (&covariance + covariance.transpose()) * 0.5;
    let std_errors = (0..p).map(|i| 2.0 * covariance[(i, i)].max(0.0).sqrt()).collect();
    Ok(Covariance { hessian: hess, covariance, std_errors, s2, pinv_warning })
}

/// Pseudo-inverse keeping only the positive part of the spectrum.
fn pseudo_inverse(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m.clone());
    let top = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let cut = top * 1e-12 * m.nrows() as f64;
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > cut {
            let v = eig.eigenvectors.column(k);
            out += (v * v.transpose()) / lam;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn linear_least_squares_matches_analytic_error() {
        let xs: Vec<f64> = (0..200).map(|i| 0.1 + 0.02 * i as f64).collect();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let noise = 0.3;
        let analytic = 2.0 * noise / sxx.sqrt();
        let normal = Normal::new(0.0, noise).unwrap();
        let mut within = 0;
        let trials = 50;
        for seed in 0..trials {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let ys: Vec<f64> = xs.iter().map(|x| 1.7 * x + normal.sample(&mut rng)).collect();
            let a_hat = xs.iter().zip(&ys).map(|(x, y)| x * y).sum::<f64>() / sxx;
            let r = |p: &[f64]| Ok(xs.iter().zip(&ys).map(|(x, y)| (y - p[0] * x).powi(2)).sum());
            let c = covariance_from_objective(r, &[a_hat], xs.len(), FdSteps::default()).unwrap();
            assert!(!c.pinv_warning);
            if (c.std_errors[0] / analytic - 1.0).abs() < 0.2 {
                within += 1;
            }
        }
        assert_eq!(within, trials);
    }

    #[test]
    fn zero_residual_gives_zero_error() {
        let r = |p: &[f64]| Ok((p[0] - 1.0).powi(2) + 3.0 * (p[1] + 2.0).powi(2));
        let c = covariance_from_objective(r, &[1.0, -2.0], 10, FdSteps::default()).unwrap();
        assert_eq!(c.s2, 0.0);
        assert!(c.std_errors.iter().all(|&e| e == 0.0));
        assert!((c.hessian[(1, 1)] - 6.0).abs() < 1e-4);
    }

    #[test]
    fn flat_direction_uses_pseudo_inverse() {
        let r = |p: &[f64]| Ok(1.0 + (p[0] - 1.0).powi(2) + 0.0 * p[1]);
        let c = covariance_from_objective(r, &[1.0, 0.5], 10, FdSteps::default()).unwrap();
        assert!(c.pinv_warning);
        assert_eq!(c.covariance[(1, 1)], 0.0);
        assert!(c.covariance[(0, 0)] > 0.0);
    }

    #[test]
    fn rejects_too_few_points() {
        let r = |_: &[f64]| Ok(0.0);
        assert!(covariance_from_objective(r, &[1.0, 2.0], 2, FdSteps::default()).is_err());
    }
}
