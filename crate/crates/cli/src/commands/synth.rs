use pairwalk::synth::synthesize;
use pairwalk::tomography::FitParams;

use super::{fit_params, fmt, nodes, out_dir, reference};
use crate::error::{CliError, CliResult};
use crate::settings::Settings;

pub fn run(s: &Settings) -> CliResult<()> {
    let mut out = out_dir(s, "synth")?;
    let p0 = reference(s, &mut out)?;
    let g: Vec<f64> = s.list("g")?.ok_or_else(|| CliError::usage("need --g"))?;
    let powers: Vec<f64> = s.list("powers")?.unwrap_or_else(|| (1..=g.len()).map(|i| i as f64).collect());
    let defaults = FitParams { f: 0.0, alpha: 0.0, beta: 0.0, gamma: 0.0, g: vec![], sigma: 0.0, ratio: 0.0 };
    let params = fit_params(s, g, &defaults)?;
    let noise: f64 = s.get_or("noise", 0.0)?;
    let seed: u64 = s.get_or("seed", 0)?;
    let nodes = nodes(s)?;
    let ds = synthesize(&params, &p0, &powers, nodes, noise, seed)?;

    out.map("reference", &p0, &[("role", "laser-off reference".into())])?;
    let names = params.names();
    let values = params.to_vec();
    let mut truth = String::new();
    for (n, v) in names.iter().zip(&values) {
        truth.push_str(&format!("{n}={}\n", fmt(*v)));
    }
    out.text("truth.txt", &truth, &[("role", "generating parameters".into())])?;
    for (i, o) in ds.observations().iter().enumerate() {
        let mut prov: Vec<(&str, String)> = names.iter().zip(&values).map(|(n, v)| (n.as_str(), fmt(*v))).collect();
        prov.extend([
            ("power_mw", fmt(o.power_mw)),
            ("coupling_index", (i + 1).to_string()),
            ("noise", fmt(noise)),
            ("seed", seed.to_string()),
            ("nodes", nodes.to_string()),
        ]);
        out.map(&format!("obs_{}", o.label), &o.map, &prov)?;
    }
    let manifest = out.finish()?;
    println!("wrote {}", manifest.display());
    Ok(())
}
