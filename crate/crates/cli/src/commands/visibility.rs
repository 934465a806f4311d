use pairwalk::grid::format::{read_data, GridData};
use pairwalk::Visibility;

use super::{fmt, out_dir};
use crate::error::{CliError, CliResult};
use crate::settings::Settings;

pub fn run(s: &Settings) -> CliResult<()> {
    let path = s.path("input").ok_or_else(|| CliError::usage("need --input"))?;
    let data = read_data(&path).map_err(|source| CliError::Input { path: path.clone(), source })?;
    let grid = match &data {
        GridData::Spectrum(sp) => *sp.grid(),
        GridData::Map(m) => *m.grid(),
    };
    let window: f64 = s.get_or("window", 2.0 * grid.hbar_omega())?;
    let v = match &data {
        GridData::Spectrum(sp) => sp.visibility(window)?,
        GridData::Map(m) => m.visibility(window)?,
    };
    println!("visibility={v:.6}");
    if s.raw("out").is_some() {
        let mut out = out_dir(s, "visibility")?;
        out.input("data", &path);
        out.text("visibility.txt", &format!("visibility={}\nwindow={}\n", fmt(v), fmt(window)), &[("window", fmt(window))])?;
        out.finish()?;
    }
    Ok(())
}
