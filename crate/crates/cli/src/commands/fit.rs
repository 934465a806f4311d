use std::fmt::Write as _;
use std::path::PathBuf;

use pairwalk::state::{build_entangled, negativity, schmidt, PhaseParams, SchmidtCutoff, DEFAULT_TRUNCATION};
use pairwalk::tomography::{fit, residuals, Dataset, FitMethod, FitOptions, FitParams, Observation};

use super::{fit_params, fmt, nodes, out_dir};
use crate::error::{CliError, CliResult};
use crate::output::read_map;
use crate::settings::Settings;

const INITIAL: FitParams = FitParams { f: 0.5, alpha: 0.5, beta: 0.0, gamma: 0.0, g: Vec::new(), sigma: 0.1, ratio: 0.3 };

fn method(s: &Settings) -> CliResult<FitMethod> {
    match s.raw("method").unwrap_or("lm") {
        "lm" | "levenberg-marquardt" => Ok(FitMethod::LevenbergMarquardt),
        "simplex" | "nelder-mead" => Ok(FitMethod::NelderMead),
        other => Err(CliError::usage(format!("unknown method '{other}' (expected lm or simplex)"))),
    }
}

pub fn run(s: &Settings) -> CliResult<()> {
    let mut out = out_dir(s, "fit")?;
    let ref_path = s.path("reference").ok_or_else(|| CliError::usage("need --reference"))?;
    out.input("reference", &ref_path);
    let reference = read_map(&ref_path)?;
    let obs_paths: Vec<PathBuf> = s.list::<String>("obs")?.ok_or_else(|| CliError::usage("need --obs"))?
        .into_iter()
        .map(PathBuf::from)
        .collect();
    let powers: Option<Vec<f64>> = s.list("powers")?;
    if powers.as_ref().is_some_and(|p| p.len() != obs_paths.len()) {
        return Err(CliError::usage("--powers needs one value per observation"));
    }
    let mut observations = Vec::new();
    for (i, path) in obs_paths.iter().enumerate() {
        out.input(&format!("obs{}", i + 1), path);
        let map = read_map(path)?;
        let (label, power_mw) = match &powers {
            Some(p) => (format!("{}mW", p[i]), p[i]),
            None => (
                path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| format!("obs{}", i + 1)),
                (i + 1) as f64,
            ),
        };
        observations.push(Observation { label, power_mw, map });
    }
    let dataset = Dataset::new(reference, observations)?;
    let g = s.list("g")?.unwrap_or_else(|| vec![1.0; dataset.len()]);
    if g.len() != dataset.len() {
        return Err(CliError::usage(format!("{} couplings given for {} observations", g.len(), dataset.len())));
    }
    let init = fit_params(s, g, &INITIAL)?;
    let defaults = FitOptions::default();
    let opts = FitOptions {
        method: method(s)?,
        max_iter: s.get_or("max_iter", defaults.max_iter)?,
        alpha_starts: s.get_or("starts", defaults.alpha_starts)?,
        seed: s.get_or("seed", defaults.seed)?,
        frozen: s.list("freeze")?.unwrap_or_default(),
        nodes: nodes(s)?,
        ..defaults
    };
    let result = fit(&dataset, &init, &opts)?;

    let p = &result.params;
    let psi = build_entangled(dataset.reference(), &PhaseParams::new(p.alpha, p.beta, p.gamma))?;
    let dec = schmidt(&psi, SchmidtCutoff::Rank(DEFAULT_TRUNCATION))?;
    let neg = negativity(p.f, dec.lambdas(), DEFAULT_TRUNCATION)?;

    let names = result.names();
    let mut body = String::from("# name value error_2sigma\n");
    for ((n, v), e) in names.iter().zip(p.to_vec()).zip(&result.std_errors) {
        writeln!(body, "{n} {} {}", fmt(v), fmt(*e)).expect("string write");
    }
    writeln!(body, "loss={}", fmt(result.loss)).expect("string write");
    writeln!(body, "s2={}", fmt(result.s2)).expect("string write");
    writeln!(body, "converged={}", result.converged).expect("string write");
    writeln!(body, "iterations={}", result.iterations).expect("string write");
    writeln!(body, "pinv_warning={}", result.pinv_warning).expect("string write");
    let lambdas: Vec<String> = dec.normalized_lambdas().iter().map(|l| fmt(*l)).collect();
    writeln!(body, "schmidt_lambdas={}", lambdas.join(",")).expect("string write");
    writeln!(body, "negativity={}", fmt(neg)).expect("string write");
    let prov = [("method", format!("{:?}", opts.method)), ("nodes", opts.nodes.to_string()), ("seed", opts.seed.to_string())];
    out.text("fit.txt", &body, &prov)?;

    let free: Vec<&String> = names.iter().zip(&result.free).filter(|(_, f)| **f).map(|(n, _)| n).collect();
    let mut cov = free.iter().map(|n| n.as_str()).collect::<Vec<_>>().join(",");
    cov.push('\n');
    for row in result.covariance.row_iter() {
        let r: Vec<String> = row.iter().map(|v| fmt(*v)).collect();
        cov.push_str(&r.join(","));
        cov.push('\n');
    }
    out.text("covariance.csv", &cov, &prov)?;

    let res = residuals(&result, &dataset)?;
    for (i, o) in dataset.observations().iter().enumerate() {
        let which = [("observation", o.label.clone())];
        out.map(&format!("residual_{}", o.label), &res.per_observation[i], &which)?;
        out.map(&format!("minus_separable_{}", o.label), &res.minus_separable[i], &which)?;
    }
    let manifest = out.finish()?;
    println!("loss={:.6e} negativity={neg:.6} converged={}", result.loss, result.converged);
    println!("wrote {}", manifest.display());
    if !result.converged {
        return Err(CliError::Unconverged { iterations: result.iterations });
    }
    Ok(())
}
