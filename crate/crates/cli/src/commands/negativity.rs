use pairwalk::state::{build_entangled, negativity, schmidt, SchmidtCutoff, DEFAULT_TRUNCATION};

use super::{fmt, out_dir, phase};
use crate::error::{CliError, CliResult};
use crate::output::read_map;
use crate::settings::Settings;

const MODES: usize = 8;

pub fn run(s: &Settings) -> CliResult<()> {
    let f: f64 = s.get_or("f", 1.0)?;
    let truncation: usize = s.get_or("truncation", DEFAULT_TRUNCATION)?;
    let write = s.raw("out").is_some();
    let mut out = if write { Some(out_dir(s, "negativity")?) } else { None };
    let lambdas: Vec<f64> = match (s.list::<f64>("lambdas")?, s.path("reference")) {
        (Some(l), None) => l,
        (None, Some(path)) => {
            let p0 = read_map(&path)?;
            let psi = build_entangled(&p0, &phase(s)?)?;
            let dec = schmidt(&psi, SchmidtCutoff::Rank(MODES.max(truncation)))?;
            if let Some(o) = out.as_mut() {
                o.input("reference", &path);
                if s.raw("modes").is_some() {
                    dec.write_to_dir(o.root().join("schmidt"))?;
                    o.note("schmidt_dir", "schmidt");
                }
            }
            dec.lambdas().to_vec()
        }
        (Some(_), Some(_)) => return Err(CliError::usage("give either --lambdas or --reference, not both")),
        (None, None) => return Err(CliError::usage("need --lambdas or --reference")),
    };
    let n = negativity(f, &lambdas, truncation)?;
    println!("negativity={n:.6}");
    if let Some(mut o) = out {
        let shown: Vec<String> = lambdas.iter().map(|l| fmt(*l)).collect();
        let body = format!(
            "negativity={}\nf={}\ntruncation={truncation}\nlambdas={}\n",
            fmt(n),
            fmt(f),
            shown.join(",")
        );
        o.text("negativity.txt", &body, &[("f", fmt(f)), ("truncation", truncation.to_string())])?;
        o.finish()?;
    }
    Ok(())
}
