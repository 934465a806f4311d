use std::fmt::Write as _;

use super::{GasDiagnostics, GasState};

/// Snapshot table: a `time` line, then `x y z vx vy vz t_emit` per active electron.
pub fn snapshot_table(state: &GasState) -> String {
    let mut s = format!("# time={:.16e}\n# x y z vx vy vz t_emit\n", state.time);
    for e in state.active() {
        let [x, y, z] = e.position;
        let [vx, vy, vz] = e.velocity;
        writeln!(s, "{x:.16e} {y:.16e} {z:.16e} {vx:.16e} {vy:.16e} {vz:.16e} {:.16e}", e.emission_time)
            .expect("string write");
    }
    s
}

/// Diagnostics time series, one row per sample.
pub fn diagnostics_table(d: &GasDiagnostics) -> String {
    let mut s = String::from(
        "# time n_active width_fwhm width_iqr mean_energy nn_mean nn_median kinetic total_energy net_injected\n",
    );
    for i in 0..d.time.len() {
        writeln!(
            s,
            "{:.6e} {} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e} {:.16e}",
            d.time[i],
            d.n_active[i],
            d.width_fwhm[i],
            d.width_iqr[i],
            d.mean_energy[i],
            d.nn_mean[i],
            d.nn_median[i],
            d.kinetic[i],
            d.total_energy[i],
            d.net_injected[i]
        )
        .expect("string write");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::{Electron, Status};

    #[test]
    fn snapshot_lists_active_electrons() {
        let e = Electron { position: [1.0, 2.0, 3.0], velocity: [0.0; 3], emission_time: -5.0, status: Status::Active };
        let p = Electron { status: Status::Pending, ..e };
        let s = snapshot_table(&GasState { time: 12.5, electrons: vec![e, p] });
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("# time="));
        let cols: Vec<f64> = lines[2].split_whitespace().map(|v| v.parse().unwrap()).collect();
        assert_eq!(cols, vec![1.0, 2.0, 3.0, 0.0, 0.0, 0.0, -5.0]);
    }

    #[test]
    fn diagnostics_rows() {
        let d = GasDiagnostics {
            time: vec![0.0, 10.0],
            n_active: vec![1, 2],
            width_fwhm: vec![0.0, 0.1],
            width_iqr: vec![0.0, 0.05],
            mean_energy: vec![1.0, 1.0],
            nn_mean: vec![f64::NAN, 3.0],
            nn_median: vec![f64::NAN, 3.0],
            kinetic: vec![1.0, 2.0],
            total_energy: vec![1.0, 2.0],
            net_injected: vec![1.0, 2.0],
        };
        let t = diagnostics_table(&d);
        assert_eq!(t.lines().count(), 3);
        assert_eq!(t.lines().nth(2).unwrap().split_whitespace().count(), 10);
    }
}
