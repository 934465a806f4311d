use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};

/// Static accelerating field. The tip is a sphere of radius `tip_radius`
/// whose apex sits at the origin, with the emission axis along `+z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldModel {
    /// Constant field of `strength` V/nm pulling electrons along `+z`; the
    /// anode plane sits at `z = gap` nm.
    Uniform { strength: f64, gap: f64 },
    /// Tip at 0 V inside a concentric anode shell at radius `anode_distance`
    /// nm held at `voltage` V: `V(r) = voltage (1/R - 1/r) / (1/R - 1/D)`.
    SphereTip { voltage: f64, anode_distance: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmitterConfig {
    pub n_electrons: usize,
    /// FWHM of the Gaussian emission-time distribution (fs), centred at t = 0.
    pub emission_fwhm: f64,
    /// Initial kinetic energy along the local surface normal (eV).
    pub initial_ke: f64,
    /// Polar half-angle of the emitting cap around the apex (degrees).
    pub emission_half_angle: f64,
    pub field: FieldModel,
    /// Tip radius (nm).
    pub tip_radius: f64,
    pub seed: u64,
}

impl Default for EmitterConfig {
    fn default() -> Self {
        Self {
            n_electrons: 135,
            emission_fwhm: 200.0,
            initial_ke: 1.0,
            emission_half_angle: 90.0,
            field: FieldModel::SphereTip { voltage: 200.0, anode_distance: 1.0e6 },
            tip_radius: 300.0,
            seed: 0,
        }
    }
}

impl EmitterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_electrons == 0 {
            return Err(invalid("need at least one electron"));
        }
        if !(self.emission_fwhm > 0.0 && self.emission_fwhm.is_finite()) {
            return Err(invalid(format!("emission FWHM must be > 0, got {}", self.emission_fwhm)));
        }
        if !(self.initial_ke > 0.0 && self.initial_ke.is_finite()) {
            return Err(invalid(format!("initial kinetic energy must be > 0, got {}", self.initial_ke)));
        }
        if !(0.0..=180.0).contains(&self.emission_half_angle) {
            return Err(invalid(format!("emission half-angle must lie in [0, 180], got {}", self.emission_half_angle)));
        }
        if !(self.tip_radius > 0.0 && self.tip_radius.is_finite()) {
            return Err(invalid(format!("tip radius must be > 0, got {}", self.tip_radius)));
        }
        match self.field {
            FieldModel::Uniform { strength, gap } => {
                if !strength.is_finite() || !(gap > 0.0) {
                    return Err(invalid("uniform field needs a finite strength and gap > 0"));
                }
            }
            FieldModel::SphereTip { voltage, anode_distance } => {
                if !voltage.is_finite() || !(anode_distance > self.tip_radius) {
                    return Err(invalid("sphere field needs a finite voltage and anode_distance > tip_radius"));
                }
            }
        }
        Ok(())
    }

    /// Flat `key=value` text, one entry per line.
    pub fn to_kv(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| writeln!(s, "{k}={v}").expect("string write");
        kv("n_electrons", self.n_electrons.to_string());
        kv("emission_fwhm", self.emission_fwhm.to_string());
        kv("initial_ke", self.initial_ke.to_string());
        kv("emission_half_angle", self.emission_half_angle.to_string());
        kv("tip_radius", self.tip_radius.to_string());
        kv("seed", self.seed.to_string());
        match self.field {
            FieldModel::Uniform { strength, gap } => {
                kv("field", "uniform".into());
                kv("field_strength", strength.to_string());
                kv("gap", gap.to_string());
            }
            FieldModel::SphereTip { voltage, anode_distance } => {
                kv("field", "sphere".into());
                kv("voltage", voltage.to_string());
                kv("anode_distance", anode_distance.to_string());
            }
        }
        s
    }

    /// Parses `key=value` lines on top of the defaults. `#` starts a comment.
    pub fn from_kv(text: &str) -> Result<Self> {
        let mut c = Self::default();
        let mut kind: Option<String> = None;
        let (mut strength, mut gap) = (1.0, 1_000_000.0);
        let (mut voltage, mut anode) = match c.field {
            FieldModel::SphereTip { voltage, anode_distance } => (voltage, anode_distance),
            FieldModel::Uniform { .. } => unreachable!("default field is a sphere"),
        };
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse { line: n + 1, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key=value, got '{line}'")))?;
            let (key, value) = (key.trim(), value.trim());
            let num = |v: &str| v.parse::<f64>().map_err(|e| parse_err(format!("{key}: {e}")));
            let int = |v: &str| v.parse::<u64>().map_err(|e| parse_err(format!("{key}: {e}")));
            match key {
                "n_electrons" => c.n_electrons = int(value)? as usize,
                "emission_fwhm" => c.emission_fwhm = num(value)?,
                "initial_ke" => c.initial_ke = num(value)?,
                "emission_half_angle" => c.emission_half_angle = num(value)?,
                "tip_radius" => c.tip_radius = num(value)?,
                "seed" => c.seed = int(value)?,
                "field" => kind = Some(value.to_string()),
                "field_strength" => strength = num(value)?,
                "gap" => gap = num(value)?,
                "voltage" => voltage = num(value)?,
                "anode_distance" => anode = num(value)?,
                _ => return Err(parse_err(format!("unknown key '{key}'"))),
            }
        }
        c.field = match kind.as_deref() {
            None | Some("sphere") => FieldModel::SphereTip { voltage, anode_distance: anode },
            Some("uniform") => FieldModel::Uniform { strength, gap },
            Some(other) => return Err(invalid(format!("unknown field model '{other}'"))),
        };
        c.validate()?;
        Ok(c)
    }
}
