//! Flat `key=value` settings merged from a config file and command-line flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use pairwalk::EnergyGrid;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq)]
enum Origin {
    File { path: PathBuf, line: usize },
    Flag,
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    origin: Origin,
}

#[derive(Debug, Clone, Default)]
pub struct Settings {
    entries: BTreeMap<String, Entry>,
    config: Option<PathBuf>,
}

impl Settings {
    pub fn load(config: Option<&Path>) -> CliResult<Self> {
        let mut s = Settings::default();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
            for (n, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| CliError::Config {
                    path: path.into(),
                    line: n + 1,
                    msg: format!("expected key=value, got '{line}'"),
                })?;
                let origin = Origin::File { path: path.into(), line: n + 1 };
                s.entries.insert(k.trim().to_string(), Entry { value: v.trim().to_string(), origin });
            }
            s.config = Some(path.into());
        }
        Ok(s)
    }

    pub fn config_path(&self) -> Option<&Path> {
        self.config.as_deref()
    }

    /// Command-line value, which takes precedence over the config file.
    pub fn set(&mut self, key: &str, value: Option<String>) {
        if let Some(value) = value {
            self.entries.insert(key.to_string(), Entry { value, origin: Origin::Flag });
        }
    }

    pub fn set_num<T: ToString>(&mut self, key: &str, value: Option<T>) {
        self.set(key, value.map(|v| v.to_string()));
    }

    pub fn set_list<T: ToString>(&mut self, key: &str, value: Option<&[T]>) {
        self.set(key, value.map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")));
    }

    fn error(&self, key: &str, msg: String) -> CliError {
        match &self.entries[key].origin {
            Origin::File { path, line } => CliError::Config { path: path.clone(), line: *line, msg },
            Origin::Flag => CliError::usage(format!("--{}: {msg}", key.replace('_', "-"))),
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|e| self.error(key, format!("cannot parse '{v}': {e}"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)?.ok_or_else(|| CliError::usage(format!("missing required setting '{key}'")))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> CliResult<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .split([',', ' '])
                .filter(|s| !s.is_empty())
                .map(|s| s.trim().parse().map_err(|e| self.error(key, format!("cannot parse '{s}': {e}"))))
                .collect::<CliResult<Vec<T>>>()
                .map(Some),
        }
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.raw(key).map(PathBuf::from)
    }

    /// Grid from `grid = k=<int> span=<int> emin=<float> hw=<float>`.
    pub fn grid(&self) -> CliResult<Option<EnergyGrid>> {
        let Some(v) = self.raw("grid") else { return Ok(None) };
        let (mut k, mut span, mut emin, mut hw) = (None, None, None, None);
        for part in v.split_whitespace() {
            let (name, val) =
                part.split_once('=').ok_or_else(|| self.error("grid", format!("expected name=value, got '{part}'")))?;
            let bad = |e: &dyn std::fmt::Display| self.error("grid", format!("{name}: {e}"));
            match name {
                "k" => k = Some(val.parse::<usize>().map_err(|e| bad(&e))?),
                "span" => span = Some(val.parse::<usize>().map_err(|e| bad(&e))?),
                "emin" => emin = Some(val.parse::<f64>().map_err(|e| bad(&e))?),
                "hw" => hw = Some(val.parse::<f64>().map_err(|e| bad(&e))?),
                _ => return Err(self.error("grid", format!("unknown grid field '{name}'"))),
            }
        }
        let hw = hw.unwrap_or(1.2);
        let k = k.unwrap_or(4);
        let span = span.ok_or_else(|| self.error("grid", "span is required".into()))?;
        let emin = emin.unwrap_or(-(span as f64) * hw / 2.0);
        EnergyGrid::new(emin, hw, k, span).map(Some).map_err(|e| self.error("grid", e.to_string()))
    }

    /// Every setting as `key=value` lines, for manifests.
    pub fn dump(&self) -> Vec<(String, String)> {
        self.entries.iter().map(|(k, e)| (k.clone(), e.value.clone())).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.txt");
        std::fs::write(&p, "# comment\nf = 0.2\nalpha=0.5 # trailing\ng=0.5,1.0\n").unwrap();
        let mut s = Settings::load(Some(&p)).unwrap();
        s.set_num("alpha", Some(0.9));
        assert_eq!(s.get::<f64>("f").unwrap(), Some(0.2));
        assert_eq!(s.get::<f64>("alpha").unwrap(), Some(0.9));
        assert_eq!(s.list::<f64>("g").unwrap(), Some(vec![0.5, 1.0]));
        assert_eq!(s.get::<f64>("beta").unwrap(), None);
    }

    #[test]
    fn file_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.txt");
        std::fs::write(&p, "f=0.2\n\nalpha=abc\n").unwrap();
        let s = Settings::load(Some(&p)).unwrap();
        match s.get::<f64>("alpha") {
            Err(CliError::Config { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        std::fs::write(&p, "f=0.2\nnonsense\n").unwrap();
        assert!(matches!(Settings::load(Some(&p)), Err(CliError::Config { line: 2, .. })));
    }

    #[test]
    fn grid_spec() {
        let mut s = Settings::default();
        s.set("grid", Some("k=4 span=24 emin=-14.4 hw=1.2".into()));
        let g = s.grid().unwrap().unwrap();
        assert_eq!(g.n_bins(), 97);
        assert!((g.e_min() + 14.4).abs() < 1e-12);
        s.set("grid", Some("k=4 bogus=1".into()));
        assert!(s.grid().is_err());
    }
}
