pub mod fit;
pub mod gas;
pub mod negativity;
pub mod simulate;
pub mod synth;
pub mod visibility;

use std::path::PathBuf;

use pairwalk::state::PhaseParams;
use pairwalk::synth::PairTemplate;
use pairwalk::tomography::FitParams;
use pairwalk::{CoincidenceMap, CouplingSpread};

use crate::error::{CliError, CliResult};
use crate::output::{read_map, OutputDir};
use crate::settings::Settings;

pub fn out_dir(s: &Settings, command: &str) -> CliResult<OutputDir> {
    let root = s.path("out").unwrap_or_else(|| PathBuf::from(format!("pairwalk-{command}")));
    OutputDir::create(&root, command, s)
}

pub fn nodes(s: &Settings) -> CliResult<usize> {
    s.get_or("nodes", CouplingSpread::DEFAULT_NODES)
}

pub fn phase(s: &Settings) -> CliResult<PhaseParams> {
    Ok(PhaseParams::new(s.get_or("alpha", 0.0)?, s.get_or("beta", 0.0)?, s.get_or("gamma", 0.0)?))
}

/// Reference map from `reference=<path>`, or the template on `grid`.
pub fn reference(s: &Settings, out: &mut OutputDir) -> CliResult<CoincidenceMap> {
    if let Some(path) = s.path("reference") {
        out.input("reference", &path);
        return read_map(&path);
    }
    let grid = s.grid()?.ok_or_else(|| CliError::usage("need --reference or --grid"))?;
    let defaults = PairTemplate::default();
    let template = PairTemplate {
        separation: s.get_or("separation", defaults.separation)?,
        width: s.get_or("width", defaults.width)?,
        ..defaults
    };
    out.note("input.reference", format!("template separation={} width={}", template.separation, template.width));
    Ok(template.reference(grid)?)
}

/// Model parameters with the given coupling list; unset values take
/// `defaults`.
pub fn fit_params(s: &Settings, g: Vec<f64>, defaults: &FitParams) -> CliResult<FitParams> {
    let p = FitParams {
        f: s.get_or("f", defaults.f)?,
        alpha: s.get_or("alpha", defaults.alpha)?,
        beta: s.get_or("beta", defaults.beta)?,
        gamma: s.get_or("gamma", defaults.gamma)?,
        g,
        sigma: s.get_or("sigma", defaults.sigma)?,
        ratio: s.get_or("ratio", defaults.ratio)?,
    };
    p.validate()?;
    Ok(p)
}

pub fn fmt(x: f64) -> String {
    format!("{x:.17e}")
}
