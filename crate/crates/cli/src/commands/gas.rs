use std::fmt::Write as _;

use pairwalk::gas::{diagnostics_table, run as run_gas, snapshot_table, EmitterConfig, RunOptions, Scheme};

use super::{fmt, out_dir};
use crate::error::{CliError, CliResult};
use crate::settings::Settings;

/// Keys of the gas config file that belong to the run rather than the emitter.
const RUN_KEYS: [&str; 7] = ["t_end", "dt", "sample_interval", "snapshot_times", "coulomb", "scheme", "out"];

fn emitter(s: &Settings) -> CliResult<EmitterConfig> {
    let mut config = match s.config_path() {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
            // blank out run keys so that line numbers stay valid
            let filtered: String = text
                .lines()
                .map(|l| {
                    let key = l.split('#').next().unwrap_or("").split('=').next().unwrap_or("").trim();
                    if RUN_KEYS.contains(&key) {
                        String::new()
                    } else {
                        l.to_string()
                    }
                })
                .collect::<Vec<_>>()
                .join("\n");
            EmitterConfig::from_kv(&filtered).map_err(|e| match e {
                pairwalk::Error::Parse { line, msg } => CliError::Config { path: path.into(), line, msg },
                other => CliError::Input { path: path.into(), source: other },
            })?
        }
        None => EmitterConfig::default(),
    };
    if let Some(n) = s.get("n_electrons")? {
        config.n_electrons = n;
    }
    if let Some(seed) = s.get("seed")? {
        config.seed = seed;
    }
    config.validate()?;
    Ok(config)
}

fn options(s: &Settings) -> CliResult<RunOptions> {
    let d = RunOptions::default();
    let scheme = match s.raw("scheme").unwrap_or("yoshida4") {
        "verlet" => Scheme::Verlet,
        "yoshida4" => Scheme::Yoshida4,
        other => return Err(CliError::usage(format!("unknown scheme '{other}' (expected verlet or yoshida4)"))),
    };
    Ok(RunOptions {
        t_end: s.get_or("t_end", d.t_end)?,
        dt: s.get_or("dt", d.dt)?,
        sample_interval: s.get_or("sample_interval", d.sample_interval)?,
        snapshot_times: s.list("snapshot_times")?.unwrap_or(d.snapshot_times),
        coulomb: s.get_or("coulomb", d.coulomb)?,
        scheme,
    })
}

fn csv(table: &str) -> String {
    table
        .lines()
        .map(|l| l.trim_start_matches("# ").split_whitespace().collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("\n")
        + "\n"
}

pub fn run(s: &Settings) -> CliResult<()> {
    let config = emitter(s)?;
    let opts = options(s)?;
    let mut out = out_dir(s, "gas")?;
    out.note("emitter", config.to_kv().trim_end().replace('\n', " "));
    let result = run_gas(&config, &opts)?;
    let d = &result.diagnostics;
    let prov = [
        ("seed", config.seed.to_string()),
        ("n_electrons", config.n_electrons.to_string()),
        ("dt", fmt(opts.dt)),
        ("t_end", fmt(opts.t_end)),
        ("scheme", format!("{:?}", opts.scheme)),
    ];
    let table = diagnostics_table(d);
    out.text("diagnostics.txt", &table, &prov)?;
    out.text("diagnostics.csv", &csv(&table), &prov)?;
    for (t, snap) in opts.snapshot_times.iter().zip(&result.snapshots) {
        out.text(&format!("snapshot_t{t}.txt"), &snapshot_table(snap), &prov)?;
    }
    let mut summary = String::new();
    let opt = |x: Option<f64>| x.map_or("nan".to_string(), fmt);
    writeln!(summary, "final_width_fwhm={}", opt(d.width_fwhm.last().copied())).expect("string write");
    writeln!(summary, "final_width_iqr={}", opt(d.width_iqr.last().copied())).expect("string write");
    writeln!(summary, "final_mean_energy={}", opt(d.mean_energy.last().copied())).expect("string write");
    writeln!(summary, "median_nn_0_400fs={}", opt(d.median_nn_between(0.0, 400.0))).expect("string write");
    writeln!(summary, "width_saturation_time_90={}", opt(d.saturation_time(0.9))).expect("string write");
    writeln!(summary, "relative_energy_drift={}", fmt(d.relative_drift())).expect("string write");
    writeln!(summary, "n_active_final={}", d.n_active.last().copied().unwrap_or(0)).expect("string write");
    out.text("summary.txt", &summary, &prov)?;
    let manifest = out.finish()?;
    print!("{summary}");
    println!("wrote {}", manifest.display());
    Ok(())
}
