use super::{GasState, Status, TipField, COULOMB_CONSTANT, ELECTRON_MASS};
use crate::error::{invalid, Error, Result};

/// Pairwise Coulomb forces (eV/nm) between the given positions. Each pair is
/// visited once and its force added to one partner and subtracted from the
/// other, so the forces sum to zero exactly pair by pair.
pub fn coulomb_forces(positions: &[[f64; 3]]) -> Vec<[f64; 3]> {
    let n = positions.len();
    let mut out = vec![[0.0; 3]; n];
    for i in 0..n {
        let pi = positions[i];
        for j in i + 1..n {
            let pj = positions[j];
            let d = [pi[0] - pj[0], pi[1] - pj[1], pi[2] - pj[2]];
            let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
            let s = COULOMB_CONSTANT / (r2 * r2.sqrt());
            for a in 0..3 {
                let f = s * d[a];
                out[i][a] += f;
                out[j][a] -= f;
            }
        }
    }
    out
}

/// Pairwise Coulomb energy (eV) of the active electrons.
pub fn coulomb_energy(state: &GasState) -> f64 {
    let p: Vec<[f64; 3]> = state.active().map(|e| e.position).collect();
    let mut u = 0.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let d = [p[i][0] - p[j][0], p[i][1] - p[j][1], p[i][2] - p[j][2]];
            u += COULOMB_CONSTANT / (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        }
    }
    u
}

/// Kinetic plus field plus (optionally) pairwise energy of the active electrons.
pub fn total_energy(state: &GasState, field: &TipField, coulomb_on: bool) -> f64 {
    let single: f64 = state.active().map(|e| e.kinetic_energy() + field.potential_energy(&e.position)).sum();
    if coulomb_on {
        single + coulomb_energy(state)
    } else {
        single
    }
}

/// Symplectic splitting used for one time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Kick-drift-kick velocity Verlet (second order).
    #[default]
    Verlet,
    /// Triple-jump composition of three velocity-Verlet substeps (fourth order).
    Yoshida4,
}

impl Scheme {
    fn substeps(self) -> &'static [f64] {
        const CBRT2: f64 = 1.259_921_049_894_873_2;
        const W1: f64 = 1.0 / (2.0 - CBRT2);
        const W0: f64 = -CBRT2 / (2.0 - CBRT2);
        match self {
            Scheme::Verlet => &[1.0],
            Scheme::Yoshida4 => &[W1, W0, W1],
        }
    }
}

/// Integrator over the active electrons, caching forces between steps.
#[derive(Debug, Clone)]
pub(crate) struct Integrator {
    field: TipField,
    coulomb: bool,
    scheme: Scheme,
    active: Vec<usize>,
    forces: Vec<[f64; 3]>,
}

/// Energy bookkeeping of one step.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct StepEvents {
    /// Energy brought in by newly emitted electrons.
    pub injected: f64,
    /// Energy carried away by electrons that hit the tip.
    pub removed: f64,
}

impl Integrator {
    pub fn new(state: &GasState, field: TipField, coulomb: bool, scheme: Scheme) -> Self {
        let mut it = Self { field, coulomb, scheme, active: Vec::new(), forces: Vec::new() };
        it.refresh(state);
        it
    }

    fn refresh(&mut self, state: &GasState) {
        self.active = (0..state.electrons.len()).filter(|&i| state.electrons[i].is_active()).collect();
        self.recompute_forces(state);
    }

    pub fn advance(&mut self, state: &mut GasState, dt: f64) -> Result<StepEvents> {
        if !(dt > 0.0) {
            return Err(invalid(format!("time step must be > 0, got {dt}")));
        }
        let limit = self.field.radius() / 10.0;
        let start: Vec<[f64; 3]> = self.active.iter().map(|&i| state.electrons[i].position).collect();
        for &w in self.scheme.substeps() {
            self.kick_drift_kick(state, w * dt);
        }
        for (&i, p0) in self.active.iter().zip(&start) {
            let p = state.electrons[i].position;
            let moved = ((p[0] - p0[0]).powi(2) + (p[1] - p0[1]).powi(2) + (p[2] - p0[2]).powi(2)).sqrt();
            if moved > limit {
                return Err(Error::StepRejected { index: i, distance: moved });
            }
        }
        state.time += dt;

        let mut events = StepEvents::default();
        let hits: Vec<usize> =
            self.active.iter().copied().filter(|&i| self.field.inside_tip(&state.electrons[i].position)).collect();
        let due = state.electrons.iter().any(|e| e.status == Status::Pending && e.emission_time <= state.time);
        if hits.is_empty() && !due {
            return Ok(events);
        }
        let before = total_energy(state, &self.field, self.coulomb);
        for &i in &hits {
            state.electrons[i].status = Status::Absorbed;
        }
        let mid = total_energy(state, &self.field, self.coulomb);
        events.removed = before - mid;
        state.activate_due();
        events.injected = total_energy(state, &self.field, self.coulomb) - mid;
        self.refresh(state);
        Ok(events)
    }

    fn kick_drift_kick(&mut self, state: &mut GasState, dt: f64) {
        let h = 0.5 * dt / ELECTRON_MASS;
        for (k, &i) in self.active.iter().enumerate() {
            let e = &mut state.electrons[i];
            let f = self.forces[k];
            for a in 0..3 {
                e.velocity[a] += h * f[a];
                e.position[a] += e.velocity[a] * dt;
            }
        }
        self.recompute_forces(state);
        for (k, &i) in self.active.iter().enumerate() {
            let e = &mut state.electrons[i];
            for a in 0..3 {
                e.velocity[a] += h * self.forces[k][a];
            }
        }
    }

    fn recompute_forces(&mut self, state: &GasState) {
        let pos: Vec<[f64; 3]> = self.active.iter().map(|&i| state.electrons[i].position).collect();
        let mut f: Vec<[f64; 3]> = pos.iter().map(|p| self.field.force(p)).collect();
        if self.coulomb {
            for (fi, ci) in f.iter_mut().zip(coulomb_forces(&pos)) {
                for a in 0..3 {
                    fi[a] += ci[a];
                }
            }
        }
        self.forces = f;
    }
}

/// One velocity-Verlet step of length `dt` (fs) for every active electron,
/// followed by removal of electrons inside the tip and activation of
/// electrons whose emission time has been reached.
pub fn step(state: &GasState, dt: f64, field: &TipField, coulomb_on: bool) -> Result<GasState> {
    step_with(state, dt, field, coulomb_on, Scheme::Verlet)
}

pub fn step_with(state: &GasState, dt: f64, field: &TipField, coulomb_on: bool, scheme: Scheme) -> Result<GasState> {
    let mut next = state.clone();
    Integrator::new(state, *field, coulomb_on, scheme).advance(&mut next, dt)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::{Electron, FieldModel};

    fn at(p: [f64; 3], v: [f64; 3]) -> Electron {
        Electron { position: p, velocity: v, emission_time: 0.0, status: Status::Active }
    }

    fn free_field() -> TipField {
        TipField::new(FieldModel::Uniform { strength: 0.0, gap: 1e9 }, 1e6)
    }

    #[test]
    fn pair_forces_are_antisymmetric() {
        let p = [[0.0, 0.0, 0.0], [3.0, -1.0, 2.0], [-7.0, 4.0, 0.5]];
        let f = coulomb_forces(&p);
        let g = coulomb_forces(&[p[1], p[0]]);
        let h = coulomb_forces(&[p[0], p[1]]);
        for a in 0..3 {
            assert_eq!(g[0][a], -h[0][a]);
            assert_eq!(h[1][a], -h[0][a]);
            assert!((f[0][a] + f[1][a] + f[2][a]).abs() < 1e-15);
        }
    }

    #[test]
    fn uniform_acceleration_is_exact() {
        let field = TipField::new(FieldModel::Uniform { strength: 0.2, gap: 1e9 }, 1e6);
        let v0 = [0.01, 0.0, 0.3];
        let mut s = GasState { time: 0.0, electrons: vec![at([0.0, 0.0, 0.0], v0)] };
        let dt = 0.1;
        for _ in 0..1000 {
            s = step(&s, dt, &field, false).unwrap();
        }
        let t = s.time;
        let a = 0.2 / ELECTRON_MASS;
        let z = v0[2] * t + 0.5 * a * t * t;
        let e = s.electrons[0];
        assert!((e.position[2] / z - 1.0).abs() < 1e-8);
        assert!((e.position[0] / (v0[0] * t) - 1.0).abs() < 1e-8);
        assert!((e.velocity[2] / (v0[2] + a * t) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn two_body_recoil_conserves() {
        let field = free_field();
        let mut s = GasState {
            time: 0.0,
            electrons: vec![at([0.0, 0.0, 950.0], [0.0; 3]), at([0.0, 0.0, 1050.0], [0.0; 3])],
        };
        let e0 = total_energy(&s, &field, true);
        let mut it = Integrator::new(&s, field, true, Scheme::Verlet);
        for _ in 0..20_000 {
            it.advance(&mut s, 0.05).unwrap();
        }
        let p = s.total_momentum();
        let scale = ELECTRON_MASS * s.electrons[0].velocity[2].abs();
        assert!(p.iter().all(|x| x.abs() <= 1e-12 * scale));
        let (k0, k1) = (s.electrons[0].kinetic_energy(), s.electrons[1].kinetic_energy());
        assert!((k0 - k1).abs() <= 1e-12 * k0);
        assert!((total_energy(&s, &field, true) - e0).abs() < 1e-6 * e0);
    }

    #[test]
    fn rejects_large_moves_and_bad_dt() {
        let field = TipField::new(FieldModel::Uniform { strength: 0.0, gap: 1e9 }, 10.0);
        let s = GasState { time: 0.0, electrons: vec![at([0.0, 0.0, 5.0], [0.0, 0.0, 20.0])] };
        assert!(matches!(step(&s, 0.1, &field, false), Err(Error::StepRejected { index: 0, .. })));
        assert!(step(&s, 0.0, &field, false).is_err());
    }

    #[test]
    fn emission_gating() {
        let field = free_field();
        let mut pending = at([0.0, 0.0, 1.0], [0.0; 3]);
        pending.status = Status::Pending;
        pending.emission_time = 0.25;
        let s = GasState { time: 0.0, electrons: vec![at([0.0, 0.0, 100.0], [0.0; 3]), pending] };
        let s1 = step(&s, 0.1, &field, true).unwrap();
        assert_eq!(s1.electrons[0].velocity, [0.0; 3]);
        assert_eq!(s1.electrons[1].status, Status::Pending);
        let s3 = step(&step(&s1, 0.1, &field, true).unwrap(), 0.1, &field, true).unwrap();
        assert_eq!(s3.electrons[1].status, Status::Active);
    }
}
