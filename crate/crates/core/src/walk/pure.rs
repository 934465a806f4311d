use ndarray::Array2;
use num_complex::Complex64;

use super::{check_loss, Coupling};
use crate::error::{invalid, Result};
use crate::grid::{CoincidenceMap, PairWavefunction};

/// Pair wavefunction after the laser interaction at fixed phase `angle(g)`:
///
/// `psi'(E1, E2) = sum_{n1,n2} J_n1 J_n2 e^{-i(n1+n2) angle(g)} psi(E1 - n1 hw, E2 - n2 hw)`.
pub fn propagate_pure(psi: &PairWavefunction, g: &Coupling) -> Result<PairWavefunction> {
    let theta = g
        .phase()
        .ok_or_else(|| invalid("propagating a wavefunction needs the coupling phase"))?;
    if g.is_zero() {
        return Ok(psi.clone());
    }
    let grid = *psi.grid();
    let k = grid.k() as isize;
    let table = g.bessel();
    let coeff: Vec<(isize, Complex64)> = table
        .iter()
        .map(|(n, j)| (n as isize * k, Complex64::from_polar(j, -(n as f64) * theta)))
        .collect();
    // the scattering operator is a tensor product, so apply it per axis
    let apply_rows = |src: &Array2<Complex64>| {
        let n = src.nrows() as isize;
        let mut out = Array2::<Complex64>::zeros(src.dim());
        for &(off, c) in &coeff {
            for i in off.max(0)..(n + off).min(n) {
                let s = (i - off) as usize;
                out.row_mut(i as usize).scaled_add(c, &src.row(s));
            }
        }
        out
    };
    let rows = apply_rows(psi.amplitudes());
    let both = apply_rows(&rows.t().to_owned()).t().to_owned();
    let out = PairWavefunction::from_parts_unchecked(grid, both);
    check_loss(psi.norm_sq(), out.norm_sq())?;
    Ok(out)
}

/// Coincidence map of a pure pair averaged over the unlocked laser phase.
///
/// Writing `psi'(theta) = sum_N e^{-i N theta} A_N` with
/// `A_N = sum_{n1 + n2 = N} J_n1 J_n2 psi(E1 - n1 hw, E2 - n2 hw)`, the phase
/// average keeps only the diagonal `sum_N |A_N|^2`. This is the three-index
/// sum over `(n1, n2, m1)` with `m2 = n1 + n2 - m1`, regrouped by total photon
/// number so that it costs one pass per source bin and the result is a sum
/// of squares.
pub fn coincidence_pure(psi: &PairWavefunction, g: &Coupling) -> Result<CoincidenceMap> {
    if g.is_zero() {
        return Ok(psi.probability());
    }
    let grid = *psi.grid();
    let n = grid.n_bins();
    let k = grid.k() as isize;
    let table = g.bessel();
    let nm = table.n_max() as isize;
    let orders = (2 * nm + 1) as usize;
    let channels = 2 * orders - 1;
    let j: Vec<f64> = table.iter().map(|(_, v)| v).collect();

    let mut acc = vec![Complex64::new(0.0, 0.0); n * n * channels];
    for ((a, b), &amp) in psi.amplitudes().indexed_iter() {
        if amp.re == 0.0 && amp.im == 0.0 {
            continue;
        }
        for i1 in 0..orders {
            let row = a as isize + (i1 as isize - nm) * k;
            if row < 0 || row >= n as isize {
                continue;
            }
            let c1 = amp * j[i1];
            let base = row as usize * n;
            for i2 in 0..orders {
                let col = b as isize + (i2 as isize - nm) * k;
                if col < 0 || col >= n as isize {
                    continue;
                }
                acc[(base + col as usize) * channels + i1 + i2] += c1 * j[i2];
            }
        }
    }
    let values = Array2::from_shape_fn((n, n), |(r, c)| {
        let start = (r * n + c) * channels;
        acc[start..start + channels].iter().map(|z| z.norm_sqr()).sum::<f64>()
    });
    let out = CoincidenceMap::from_parts_unchecked(grid, values);
    check_loss(psi.norm_sq(), out.mass())?;
    Ok(out)
}

/// Coincidence map of the mixture `sum_n w_n |psi_n><psi_n|`.
pub fn coincidence_mixed(
    components: &[(f64, PairWavefunction)],
    g: &Coupling,
) -> Result<CoincidenceMap> {
    let first = components.first().ok_or_else(|| invalid("mixture has no components"))?;
    if components.iter().any(|(w, _)| !(*w >= 0.0)) {
        return Err(invalid("mixture weights must be nonnegative"));
    }
    let total: f64 = components.iter().map(|(w, _)| w).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("mixture weights sum to {total}, expected 1")));
    }
    let grid = *first.1.grid();
    let mut values = Array2::zeros((grid.n_bins(), grid.n_bins()));
    for (w, psi) in components {
        grid.ensure_compatible(psi.grid())?;
        if *w == 0.0 {
            continue;
        }
        let p = coincidence_pure(psi, g)?;
        values.scaled_add(*w, p.values());
    }
    Ok(CoincidenceMap::from_parts_unchecked(grid, values))
}
