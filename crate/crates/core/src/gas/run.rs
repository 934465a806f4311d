use super::dynamics::{Integrator, Scheme};
use super::stats::local_energies;
use super::{nearest_neighbor_stats, sample_emission, spread_widths, total_energy, EmitterConfig, GasState, TipField};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    /// End time (fs); the run starts at the earliest emission time.
    pub t_end: f64,
    pub dt: f64,
    /// Spacing of diagnostic samples (fs).
    pub sample_interval: f64,
    /// Times at which full snapshots are kept.
    pub snapshot_times: Vec<f64>,
    pub coulomb: bool,
    pub scheme: Scheme,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            t_end: 1500.0,
            dt: 0.1,
            sample_interval: 10.0,
            snapshot_times: vec![400.0],
            coulomb: true,
            scheme: Scheme::Yoshida4,
        }
    }
}

/// Time series sampled during a run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GasDiagnostics {
    pub time: Vec<f64>,
    pub n_active: Vec<usize>,
    /// Gaussian-equivalent FWHM of the energy relative to the local potential (eV).
    pub width_fwhm: Vec<f64>,
    pub width_iqr: Vec<f64>,
    pub mean_energy: Vec<f64>,
    /// NaN while fewer than two electrons are out.
    pub nn_mean: Vec<f64>,
    pub nn_median: Vec<f64>,
    pub kinetic: Vec<f64>,
    pub total_energy: Vec<f64>,
    /// Energy brought in by emission minus energy removed at the tip, so far.
    pub net_injected: Vec<f64>,
}

impl GasDiagnostics {
    /// Largest `|E(t) - net_injected(t)|` relative to the largest total kinetic energy.
    pub fn relative_drift(&self) -> f64 {
        let scale = self.kinetic.iter().fold(0.0f64, |m, &k| m.max(k.abs()));
        let worst = self
            .total_energy
            .iter()
            .zip(&self.net_injected)
            .fold(0.0f64, |m, (e, i)| m.max((e - i).abs()));
        if scale == 0.0 {
            0.0
        } else {
            worst / scale
        }
    }

    /// First sample time at which the width reaches `fraction` of its final value.
    pub fn saturation_time(&self, fraction: f64) -> Option<f64> {
        let last = *self.width_fwhm.last()?;
        self.time.iter().zip(&self.width_fwhm).find(|(_, &w)| w >= fraction * last).map(|(t, _)| *t)
    }

    /// Median over samples in `[t0, t1]` of the sampled median NN distance.
    pub fn median_nn_between(&self, t0: f64, t1: f64) -> Option<f64> {
        let mut v: Vec<f64> = self
            .time
            .iter()
            .zip(&self.nn_median)
            .filter(|(t, d)| **t >= t0 && **t <= t1 && d.is_finite())
            .map(|(_, d)| *d)
            .collect();
        if v.is_empty() {
            return None;
        }
        v.sort_by(f64::total_cmp);
        Some(super::stats::quantile(&v, 0.5))
    }

    /// Width at the sample nearest to `t`.
    pub fn width_at(&self, t: f64) -> Option<f64> {
        let i = (0..self.time.len()).min_by(|&a, &b| (self.time[a] - t).abs().total_cmp(&(self.time[b] - t).abs()))?;
        Some(self.width_fwhm[i])
    }

    fn record(&mut self, state: &GasState, field: &TipField, coulomb: bool, net_injected: f64) {
        let eps = local_energies(state, field);
        let w = spread_widths(&eps);
        let (nm, nmed) = nearest_neighbor_stats(state).unwrap_or((f64::NAN, f64::NAN));
        self.time.push(state.time);
        self.n_active.push(eps.len());
        self.width_fwhm.push(w.fwhm);
        self.width_iqr.push(w.iqr);
        self.mean_energy.push(w.mean);
        self.nn_mean.push(nm);
        self.nn_median.push(nmed);
        self.kinetic.push(state.active().map(|e| e.kinetic_energy()).sum());
        self.total_energy.push(total_energy(state, field, coulomb));
        self.net_injected.push(net_injected);
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub snapshots: Vec<GasState>,
    pub diagnostics: GasDiagnostics,
    pub final_state: GasState,
}

/// Emits and propagates the gas of `config` until `options.t_end`.
pub fn run(config: &EmitterConfig, options: &RunOptions) -> Result<RunOutput> {
    if !(options.dt > 0.0) {
        return Err(invalid(format!("time step must be > 0, got {}", options.dt)));
    }
    if !(options.sample_interval > 0.0) {
        return Err(invalid("sample interval must be > 0"));
    }
    let field = TipField::from_config(config);
    let mut state = sample_emission(config)?;
    if !(options.t_end > state.time) {
        return Err(invalid(format!("t_end {} precedes the first emission at {}", options.t_end, state.time)));
    }
    let t0 = state.time;
    let mut net = total_energy(&state, &field, options.coulomb);
    let mut diag = GasDiagnostics::default();
    diag.record(&state, &field, options.coulomb, net);
    let mut snaps: Vec<f64> = options.snapshot_times.clone();
    snaps.sort_by(f64::total_cmp);
    let mut snaps = snaps.into_iter().peekable();
    let mut snapshots = Vec::new();
    let steps = ((options.t_end - t0) / options.dt).ceil() as usize;
    let every = ((options.sample_interval / options.dt).round() as usize).max(1);
    let mut integrator = Integrator::new(&state, field, options.coulomb, options.scheme);
    for n in 1..=steps {
        // time from the step count, so that long runs do not accumulate drift
        let target = t0 + n as f64 * options.dt;
        let ev = integrator.advance(&mut state, options.dt)?;
        state.time = target;
        net += ev.injected - ev.removed;
        while snaps.peek().is_some_and(|&t| t <= state.time) {
            snaps.next();
            snapshots.push(state.clone());
        }
        if n % every == 0 || n == steps {
            diag.record(&state, &field, options.coulomb, net);
        }
    }
    Ok(RunOutput { snapshots, diagnostics: diag, final_state: state })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::FieldModel;

    #[test]
    fn single_electron_has_no_width() {
        let c = EmitterConfig { n_electrons: 1, ..Default::default() };
        let out = run(&c, &RunOptions { t_end: 200.0, ..Default::default() }).unwrap();
        assert!(out.diagnostics.width_fwhm.iter().all(|&w| w == 0.0));
        assert!(out.diagnostics.width_iqr.iter().all(|&w| w == 0.0));
        assert!(out.diagnostics.nn_median.iter().all(|d| d.is_nan()));
    }

    #[test]
    fn seed_determinism_and_energy_bookkeeping() {
        let c = EmitterConfig { n_electrons: 20, seed: 3, ..Default::default() };
        let o = RunOptions { t_end: 300.0, snapshot_times: vec![0.0, 200.0], ..Default::default() };
        let a = run(&c, &o).unwrap();
        let b = run(&c, &o).unwrap();
        let table = crate::gas::diagnostics_table;
        assert_eq!(table(&a.diagnostics), table(&b.diagnostics));
        assert_eq!(a.snapshots.len(), 2);
        assert!(a.diagnostics.relative_drift() < 1e-4, "{}", a.diagnostics.relative_drift());
        assert_eq!(*a.diagnostics.n_active.last().unwrap(), 20);
    }

    #[test]
    fn uniform_field_single_electron_lands_on_the_drop() {
        let c = EmitterConfig {
            n_electrons: 1,
            emission_half_angle: 0.0,
            field: FieldModel::Uniform { strength: 1.0, gap: 5_000.0 },
            ..Default::default()
        };
        let out = run(&c, &RunOptions { t_end: 100.0, ..Default::default() }).unwrap();
        let field = TipField::from_config(&c);
        let sp = crate::gas::energy_spectrum(&out.final_state, &field, 4_990.0, 0.5, 41).unwrap();
        assert!((sp.energies[0] - 5_001.0).abs() < 1e-6);
    }
}
