use pairwalk::grid::blur;
use pairwalk::state::build_entangled;
use pairwalk::walk::{average_over_coupling, coincidence_classical, coincidence_pure, coincidence_separable};
use pairwalk::{CoincidenceMap, Coupling, CouplingSpread, Result};

use super::{fmt, nodes, out_dir, phase, reference};
use crate::error::{CliError, CliResult};
use crate::settings::Settings;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Model {
    Separable,
    Classical,
    Entangled,
    Blend,
}

impl Model {
    fn parse(name: &str) -> CliResult<Self> {
        match name {
            "separable" => Ok(Model::Separable),
            "classical" => Ok(Model::Classical),
            "entangled" => Ok(Model::Entangled),
            "blend" => Ok(Model::Blend),
            other => Err(CliError::usage(format!(
                "unknown model '{other}' (expected separable, entangled, classical or blend)"
            ))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Model::Separable => "separable",
            Model::Classical => "classical",
            Model::Entangled => "entangled",
            Model::Blend => "blend",
        }
    }
}

pub fn run(s: &Settings) -> CliResult<()> {
    let mut out = out_dir(s, "simulate")?;
    let p0 = reference(s, &mut out)?;
    let models: Vec<Model> = s
        .list::<String>("model")?
        .unwrap_or_else(|| vec!["separable".into()])
        .iter()
        .map(|m| Model::parse(m))
        .collect::<CliResult<_>>()?;
    let couplings: Vec<f64> = s.list("g")?.ok_or_else(|| CliError::usage("need --g"))?;
    let phase = phase(s)?;
    let sigma: f64 = s.get_or("sigma", 0.0)?;
    let spread = CouplingSpread::new(s.get_or("ratio", 0.0)?, nodes(s)?)?;
    let psi = if models.iter().any(|m| matches!(m, Model::Entangled | Model::Blend)) {
        Some(build_entangled(&p0, &phase)?)
    } else {
        None
    };
    for &model in &models {
        let f: f64 = match model {
            Model::Blend => s.require("f")?,
            Model::Entangled => 1.0,
            _ => 0.0,
        };
        for (i, &g) in couplings.iter().enumerate() {
            let at = |ge: f64| -> Result<CoincidenceMap> {
                let c = Coupling::new(ge)?;
                let sep = || coincidence_separable(&p0, &c);
                let pure = || coincidence_pure(psi.as_ref().expect("wavefunction built"), &c);
                match model {
                    Model::Separable => sep(),
                    Model::Classical => coincidence_classical(&p0, &c),
                    Model::Entangled => pure(),
                    Model::Blend => CoincidenceMap::combine(f, &pure()?, 1.0 - f, &sep()?),
                }
            };
            let map = if g == 0.0 { at(0.0)? } else { average_over_coupling(at, g, &spread)? };
            let map = if sigma > 0.0 { blur(&map, sigma)? } else { map };
            let mut prov = vec![("model", model.name().to_string()), ("g", fmt(g))];
            if matches!(model, Model::Entangled | Model::Blend) {
                prov.extend([
                    ("f", fmt(f)),
                    ("alpha", fmt(phase.alpha)),
                    ("beta", fmt(phase.beta)),
                    ("gamma", fmt(phase.gamma)),
                ]);
            }
            prov.extend([("sigma", fmt(sigma)), ("ratio", fmt(spread.ratio())), ("nodes", spread.nodes().to_string())]);
            out.map(&format!("{}_g{}", model.name(), i + 1), &map, &prov)?;
        }
    }
    let manifest = out.finish()?;
    println!("wrote {}", manifest.display());
    Ok(())
}
