use super::{EmitterConfig, FieldModel};

/// Field model bound to a tip geometry. The tip centre sits at `(0, 0, -R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TipField {
    model: FieldModel,
    radius: f64,
}

impl TipField {
    pub fn new(model: FieldModel, radius: f64) -> Self {
        Self { model, radius }
    }

    pub fn from_config(c: &EmitterConfig) -> Self {
        Self::new(c.field, c.tip_radius)
    }

    pub fn model(&self) -> FieldModel {
        self.model
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn center(&self) -> [f64; 3] {
        [0.0, 0.0, -self.radius]
    }

    fn from_center(&self, p: &[f64; 3]) -> ([f64; 3], f64) {
        let d = [p[0], p[1], p[2] + self.radius];
        let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        (d, r)
    }

    /// Whether `p` lies inside the tip body (the surface itself is outside).
    pub fn inside_tip(&self, p: &[f64; 3]) -> bool {
        self.from_center(p).1 < self.radius * (1.0 - 1e-12)
    }

    /// Electrostatic potential (V).
    pub fn potential(&self, p: &[f64; 3]) -> f64 {
        match self.model {
            FieldModel::Uniform { strength, .. } => strength * p[2],
            FieldModel::SphereTip { voltage, anode_distance } => {
                let r = self.from_center(p).1;
                let rr = self.radius;
                voltage * (1.0 / rr - 1.0 / r) / (1.0 / rr - 1.0 / anode_distance)
            }
        }
    }

    /// Electron potential energy (eV), `-V`.
    pub fn potential_energy(&self, p: &[f64; 3]) -> f64 {
        -self.potential(p)
    }

    /// Force on an electron (eV/nm), `grad V`.
    pub fn force(&self, p: &[f64; 3]) -> [f64; 3] {
        match self.model {
            FieldModel::Uniform { strength, .. } => [0.0, 0.0, strength],
            FieldModel::SphereTip { voltage, anode_distance } => {
                let (d, r) = self.from_center(p);
                let s = voltage / (1.0 / self.radius - 1.0 / anode_distance) / (r * r * r);
                [s * d[0], s * d[1], s * d[2]]
            }
        }
    }

    /// Potential-energy drop still ahead of an electron at `p`: to the anode
    /// plane for the uniform field, to infinity for the sphere.
    pub fn remaining_drop(&self, p: &[f64; 3]) -> f64 {
        match self.model {
            FieldModel::Uniform { strength, gap } => strength * (gap - p[2]),
            FieldModel::SphereTip { voltage, anode_distance } => {
                let r = self.from_center(p).1;
                voltage * (1.0 / r) / (1.0 / self.radius - 1.0 / anode_distance)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_potential_boundary_values() {
        let f = TipField::new(FieldModel::SphereTip { voltage: 1750.0, anode_distance: 1e5 }, 500.0);
        assert!(f.potential(&[0.0, 0.0, 0.0]).abs() < 1e-9);
        assert!((f.potential(&[0.0, 0.0, 1e5 - 500.0]) - 1750.0).abs() < 1e-9);
        assert!(f.inside_tip(&[0.0, 0.0, -1.0]) && !f.inside_tip(&[0.0, 0.0, 1.0]));
    }

    #[test]
    fn force_is_minus_gradient_of_energy() {
        for model in [
            FieldModel::SphereTip { voltage: 1750.0, anode_distance: 1e5 },
            FieldModel::Uniform { strength: 0.3, gap: 1e4 },
        ] {
            let f = TipField::new(model, 500.0);
            let p = [120.0, -40.0, 300.0];
            let h = 1e-3;
            let force = f.force(&p);
            for a in 0..3 {
                let (mut up, mut dn) = (p, p);
                up[a] += h;
                dn[a] -= h;
                let num = -(f.potential_energy(&up) - f.potential_energy(&dn)) / (2.0 * h);
                assert!((num - force[a]).abs() < 1e-7 * force[2].abs().max(1.0));
            }
            let drop_diff = f.remaining_drop(&p) - f.potential_energy(&p);
            let q = [0.0, 3.0, 900.0];
            assert!((drop_diff - (f.remaining_drop(&q) - f.potential_energy(&q))).abs() < 1e-9);
        }
    }
}
