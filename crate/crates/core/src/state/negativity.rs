use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{invalid, Result};

/// Schmidt modes kept when evaluating the negativity.
pub const DEFAULT_TRUNCATION: usize = 3;
const MAX_BRUTEFORCE_TRUNCATION: usize = 8;

fn truncated(f: f64, lambdas: &[f64], truncation: usize) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&f) {
        return Err(invalid(format!("entanglement fraction must lie in [0, 1], got {f}")));
    }
    if truncation == 0 {
        return Err(invalid("truncation must keep at least one mode"));
    }
    if lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(invalid("Schmidt coefficients must be finite and nonnegative"));
    }
    if lambdas.iter().sum::<f64>() > 1.0 + 1e-6 {
        return Err(invalid("Schmidt coefficients sum to more than one"));
    }
    let kept: Vec<f64> = lambdas.iter().copied().take(truncation).collect();
    let total: f64 = kept.iter().sum();
    if !(total > 0.0) {
        return Err(invalid("truncated Schmidt coefficients have zero weight"));
    }
    let out: Vec<f64> = kept.iter().map(|l| l / total).collect();
    let check: f64 = out.iter().sum();
    if (check - 1.0).abs() > 1e-6 {
        return Err(invalid(format!("renormalized coefficients sum to {check}")));
    }
    Ok(out)
}

/// Negativity of `f |psi><psi| + (1 - f) sum_n lambda_n |nn><nn|` on the first
/// `truncation` Schmidt modes (coefficients renormalized after truncation):
/// `f sum_{m < n} sqrt(lambda_m lambda_n)`.
pub fn negativity(f: f64, lambdas: &[f64], truncation: usize) -> Result<f64> {
    let l = truncated(f, lambdas, truncation)?;
    let mut s = 0.0;
    for m in 0..l.len() {
        for n in m + 1..l.len() {
            s += (l[m] * l[n]).sqrt();
        }
    }
    Ok(f * s)
}

/// Sum of the magnitudes of the negative eigenvalues of the partial transpose,
/// computed on the dense truncated density matrix.
pub fn negativity_bruteforce(f: f64, lambdas: &[f64], truncation: usize) -> Result<f64> {
    if truncation > MAX_BRUTEFORCE_TRUNCATION {
        return Err(invalid(format!(
            "brute-force negativity supports truncation <= {MAX_BRUTEFORCE_TRUNCATION}, got {truncation}"
        )));
    }
    let l = truncated(f, lambdas, truncation)?;
    let t = l.len();
    let idx = |a: usize, b: usize| a * t + b;
    let mut rho = DMatrix::<f64>::zeros(t * t, t * t);
    for m in 0..t {
        for n in 0..t {
            rho[(idx(m, m), idx(n, n))] += f * (l[m] * l[n]).sqrt();
        }
        rho[(idx(m, m), idx(m, m))] += (1.0 - f) * l[m];
    }
    // transpose on the first subsystem
    let pt = DMatrix::from_fn(t * t, t * t, |r, c| {
        let (a, b) = (r / t, r % t);
        let (a2, b2) = (c / t, c % t);
        rho[(idx(a2, b), idx(a, b2))]
    });
    let eig = SymmetricEigen::new(pt);
    Ok(eig.eigenvalues.iter().filter(|&&e| e < 0.0).map(|e| -e).sum())
}
