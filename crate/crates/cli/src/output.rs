//! Output directory handling: map files, CSV matrices and the manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use pairwalk::grid::format;
use pairwalk::CoincidenceMap;

use crate::error::{CliError, CliResult};
use crate::settings::Settings;

pub struct OutputDir {
    root: PathBuf,
    command: String,
    header: Vec<(String, String)>,
    files: Vec<(String, Vec<(String, String)>)>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

impl OutputDir {
    pub fn create(root: &Path, command: &str, settings: &Settings) -> CliResult<Self> {
        std::fs::create_dir_all(root).map_err(io_err(root))?;
        let mut header = vec![("command".to_string(), command.to_string())];
        header.push(("version".into(), env!("CARGO_PKG_VERSION").into()));
        if let Some(p) = settings.config_path() {
            header.push(("config".into(), absolute(p)));
        }
        header.extend(settings.dump().into_iter().map(|(k, v)| (format!("setting.{k}"), v)));
        Ok(Self { root: root.to_path_buf(), command: command.into(), header, files: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Adds an input file, recorded with its absolute path.
    pub fn input(&mut self, role: &str, path: &Path) {
        self.header.push((format!("input.{role}"), absolute(path)));
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.header.push((key.into(), value.to_string()));
    }

    fn record(&mut self, name: &str, provenance: &[(&str, String)]) {
        let prov = provenance.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        self.files.push((name.to_string(), prov));
    }

    pub fn text(&mut self, name: &str, contents: &str, provenance: &[(&str, String)]) -> CliResult<PathBuf> {
        let path = self.root.join(name);
        std::fs::write(&path, contents).map_err(io_err(&path))?;
        self.record(name, provenance);
        Ok(path)
    }

    /// Writes `<stem>.txt` in the map format and `<stem>.csv` for plotting.
    pub fn map(&mut self, stem: &str, map: &CoincidenceMap, provenance: &[(&str, String)]) -> CliResult<()> {
        self.text(&format!("{stem}.txt"), &format::map_to_string(map), provenance)?;
        self.text(&format!("{stem}.csv"), &map_csv(map), provenance)?;
        Ok(())
    }

    /// Writes `manifest.txt`: the run header, then one section per output file.
    pub fn finish(self) -> CliResult<PathBuf> {
        let mut s = format!("# pairwalk {} manifest\n", self.command);
        for (k, v) in &self.header {
            writeln!(s, "{k}={v}").expect("string write");
        }
        for (name, prov) in &self.files {
            writeln!(s, "\n[{name}]").expect("string write");
            for (k, v) in prov {
                writeln!(s, "{k}={v}").expect("string write");
            }
        }
        let path = self.root.join("manifest.txt");
        std::fs::write(&path, s).map_err(io_err(&path))?;
        Ok(path)
    }
}

fn absolute(p: &Path) -> String {
    std::path::absolute(p).unwrap_or_else(|_| p.to_path_buf()).display().to_string()
}

/// Matrix CSV: first row holds the E2 axis, first column the E1 axis.
pub fn map_csv(map: &CoincidenceMap) -> String {
    let g = map.grid();
    let mut s = String::from("E1\\E2");
    for e in g.energies() {
        write!(s, ",{e:.17e}").expect("string write");
    }
    s.push('\n');
    for (i, row) in map.values().rows().into_iter().enumerate() {
        write!(s, "{:.17e}", g.energy(i)).expect("string write");
        for v in row {
            write!(s, ",{v:.17e}").expect("string write");
        }
        s.push('\n');
    }
    s
}

pub fn read_map(path: &Path) -> CliResult<CoincidenceMap> {
    format::read_map(path).map_err(|source| CliError::Input { path: path.into(), source })
}
