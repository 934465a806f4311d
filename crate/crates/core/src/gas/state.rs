use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Normal};

use super::{EmitterConfig, TipField, ELECTRON_MASS, FWHM_PER_SIGMA};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// Not yet emitted; position and velocity hold the emission values.
    Pending,
    Active,
    /// Returned into the tip body and removed.
    Absorbed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Electron {
    pub position: [f64; 3],
    pub velocity: [f64; 3],
    pub emission_time: f64,
    pub status: Status,
}

impl Electron {
    pub fn is_active(&self) -> bool {
        self.status == Status::Active
    }

    pub fn kinetic_energy(&self) -> f64 {
        let v = self.velocity;
        0.5 * ELECTRON_MASS * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GasState {
    pub time: f64,
    pub electrons: Vec<Electron>,
}

impl GasState {
    pub fn active(&self) -> impl Iterator<Item = &Electron> + '_ {
        self.electrons.iter().filter(|e| e.is_active())
    }

    pub fn n_active(&self) -> usize {
        self.active().count()
    }

    pub fn total_momentum(&self) -> [f64; 3] {
        let mut p = [0.0; 3];
        for e in self.active() {
            for a in 0..3 {
                p[a] += ELECTRON_MASS * e.velocity[a];
            }
        }
        p
    }

    /// Activates every pending electron due by `self.time`.
    pub(crate) fn activate_due(&mut self) -> Vec<usize> {
        let mut fresh = Vec::new();
        for (i, e) in self.electrons.iter_mut().enumerate() {
            if e.status == Status::Pending && e.emission_time <= self.time {
                e.status = Status::Active;
                fresh.push(i);
            }
        }
        fresh
    }
}

/// Emission sites uniform in area on the apex cap of the configured
/// half-angle, velocities along the local surface normal, Gaussian emission
/// times centred at 0. The state starts at the earliest emission time with
/// that electron already active.
pub fn sample_emission(config: &EmitterConfig) -> Result<GasState> {
    config.validate()?;
    let field = TipField::from_config(config);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed);
    let time_dist = Normal::new(0.0, config.emission_fwhm / FWHM_PER_SIGMA).expect("positive width");
    let cos_min = config.emission_half_angle.to_radians().cos();
    let speed = (2.0 * config.initial_ke / ELECTRON_MASS).sqrt();
    let c = field.center();
    let electrons: Vec<Electron> = (0..config.n_electrons)
        .map(|_| {
            let t = time_dist.sample(&mut rng);
            let cos_t: f64 = if cos_min >= 1.0 { 1.0 } else { rng.random_range(cos_min..=1.0) };
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
            let n = [sin_t * phi.cos(), sin_t * phi.sin(), cos_t];
            let r = field.radius();
            Electron {
                position: [c[0] + r * n[0], c[1] + r * n[1], c[2] + r * n[2]],
                velocity: [speed * n[0], speed * n[1], speed * n[2]],
                emission_time: t,
                status: Status::Pending,
            }
        })
        .collect();
    let start = electrons.iter().map(|e| e.emission_time).fold(f64::INFINITY, f64::min);
    let mut state = GasState { time: start, electrons };
    state.activate_due();
    Ok(state)
}
