use super::{check_loss, comb_1d, comb_both, Coupling};
use crate::error::Result;
use crate::grid::{CoincidenceMap, Spectrum1D};

fn sideband_weights(g: &Coupling) -> Vec<(i64, f64)> {
    g.bessel().iter().map(|(n, j)| (n, j * j)).collect()
}

/// Single-electron walk: `P(E, g) = sum_n J_n(2|g|)^2 P(E - n hbar_omega, 0)`.
pub fn walk_1e(spectrum: &Spectrum1D, g: &Coupling) -> Result<Spectrum1D> {
    if g.is_zero() {
        return Ok(spectrum.clone());
    }
    let grid = *spectrum.grid();
    let values = comb_1d(spectrum.values(), grid.k(), &sideband_weights(g));
    let out = Spectrum1D::new(grid, values)?;
    check_loss(spectrum.mass(), out.mass())?;
    Ok(out)
}

/// Coincidence map of any separable pair with unmodulated map `p0`; each
/// electron receives an independent incoherent sideband comb.
pub fn coincidence_separable(p0: &CoincidenceMap, g: &Coupling) -> Result<CoincidenceMap> {
    if g.is_zero() {
        return Ok(p0.clone());
    }
    let grid = *p0.grid();
    let values = comb_both(p0.values(), grid.k(), &sideband_weights(g));
    let out = CoincidenceMap::from_parts_unchecked(grid, values);
    check_loss(p0.mass(), out.mass())?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::grid::EnergyGrid;
    use crate::walk::BesselTable;

    fn grid() -> EnergyGrid {
        EnergyGrid::new(-24.0, 1.2, 4, 40).unwrap()
    }

    #[test]
    fn delta_becomes_bessel_comb() {
        let g = grid();
        let zero = g.index_of(0.0).unwrap();
        let c = Coupling::new(0.98).unwrap();
        let out = walk_1e(&Spectrum1D::delta_at(g, zero), &c).unwrap();
        let t = BesselTable::for_coupling(0.98, 1e-12);
        for (i, v) in out.values().iter().enumerate() {
            let off = i as i64 - zero as i64;
            let expect = if off % 4 == 0 { t.get(off / 4).powi(2) / g.delta() } else { 0.0 };
            assert!((v - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn second_moment_grows_by_two_g_squared() {
        let g = grid();
        let s = Spectrum1D::from_fn(g, |e| (-(e - 0.3).powi(2) / (2.0 * 0.5f64.powi(2))).exp())
            .unwrap()
            .normalized()
            .unwrap();
        for &m in &[0.56, 0.98, 1.33] {
            let out = walk_1e(&s, &Coupling::new(m).unwrap()).unwrap();
            let gained = out.variance() - s.variance();
            let expect = 2.0 * m * m * 1.2 * 1.2;
            assert!(((gained - expect) / expect).abs() < 1e-6, "{gained} vs {expect}");
            assert!((out.mass() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn narrow_grid_is_reported() {
        let g = EnergyGrid::new(-2.4, 1.2, 4, 4).unwrap();
        let s = Spectrum1D::delta_at(g, g.index_of(0.0).unwrap());
        assert!(matches!(walk_1e(&s, &Coupling::new(1.33).unwrap()), Err(Error::GridTooNarrow { .. })));
    }

    #[test]
    fn separable_delta_is_product_comb() {
        let g = EnergyGrid::new(-12.0, 1.2, 2, 20).unwrap();
        let z = g.index_of(0.0).unwrap();
        let c = Coupling::new(0.56).unwrap();
        let out = coincidence_separable(&CoincidenceMap::delta_at(g, z, z), &c).unwrap();
        let t = BesselTable::for_coupling(0.56, 1e-12);
        let d2 = g.delta() * g.delta();
        for m in -3..=3i64 {
            for l in -3..=3i64 {
                let v = out.values()[((z as i64 + 2 * m) as usize, (z as i64 + 2 * l) as usize)];
                let expect = t.get(m).powi(2) * t.get(l).powi(2) / d2;
                assert!((v - expect).abs() < 1e-14);
            }
        }
        assert_eq!(out.values()[(z + 1, z)], 0.0);
    }
}
