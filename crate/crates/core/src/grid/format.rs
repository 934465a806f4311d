//! Plain-text map and spectrum files.
//!
//! ```text
//! # e_min=<float> delta=<float> n_bins=<int> hbar_omega=<float>
//! <n_bins lines of n_bins values>      (map; row = E1 bin, column = E2 bin)
//! <one line of n_bins values>          (spectrum)
//! ```
//!
//! Values are written with 17 significant digits so a write/read cycle is
//! exact.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2};

use super::{CoincidenceMap, EnergyGrid, Spectrum1D};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Header line for `grid`, without trailing newline.
pub fn header(grid: &EnergyGrid) -> String {
    format!(
        "# e_min={:.16e} delta={:.16e} n_bins={} hbar_omega={:.16e}",
        grid.e_min(),
        grid.delta(),
        grid.n_bins(),
        grid.hbar_omega()
    )
}

fn parse_header(line: &str, line_no: usize) -> Result<EnergyGrid> {
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| parse_err(line_no, "expected header starting with '#'"))?;
    let (mut e_min, mut delta, mut n_bins, mut hbar_omega) = (None, None, None, None);
    for tok in body.split_whitespace() {
        let (key, value) =
            tok.split_once('=').ok_or_else(|| parse_err(line_no, format!("bad token '{tok}'")))?;
        let num = || {
            value
                .parse::<f64>()
                .map_err(|_| parse_err(line_no, format!("bad number '{value}' for {key}")))
        };
        match key {
            "e_min" => e_min = Some(num()?),
            "delta" => delta = Some(num()?),
            "hbar_omega" => hbar_omega = Some(num()?),
            "n_bins" => {
                n_bins = Some(
                    value
                        .parse::<usize>()
                        .map_err(|_| parse_err(line_no, format!("bad n_bins '{value}'")))?,
                )
            }
            _ => {}
        }
    }
    let missing = |name: &str| parse_err(line_no, format!("header is missing {name}"));
    EnergyGrid::from_parts(
        e_min.ok_or_else(|| missing("e_min"))?,
        delta.ok_or_else(|| missing("delta"))?,
        n_bins.ok_or_else(|| missing("n_bins"))?,
        hbar_omega.ok_or_else(|| missing("hbar_omega"))?,
    )
    .map_err(|e| parse_err(line_no, e.to_string()))
}

fn write_row<'a>(out: &mut String, values: impl Iterator<Item = &'a f64>) {
    let mut first = true;
    for v in values {
        if !first {
            out.push(' ');
        }
        first = false;
        let _ = write!(out, "{v:.16e}");
    }
    out.push('\n');
}

fn parse_row(line: &str, line_no: usize, expect: usize) -> Result<Vec<f64>> {
    let row: Vec<f64> = line
        .split_whitespace()
        .map(|t| t.parse::<f64>().map_err(|_| parse_err(line_no, format!("bad number '{t}'"))))
        .collect::<Result<_>>()?;
    if row.len() != expect {
        return Err(parse_err(line_no, format!("expected {expect} values, found {}", row.len())));
    }
    Ok(row)
}

/// Non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty())
}

pub fn map_to_string(map: &CoincidenceMap) -> String {
    let mut out = header(map.grid());
    out.push('\n');
    for row in map.values().rows() {
        write_row(&mut out, row.iter());
    }
    out
}

pub fn map_from_str(text: &str) -> Result<CoincidenceMap> {
    let mut lines = content_lines(text);
    let (hl, h) = lines.next().ok_or_else(|| parse_err(1, "empty map file"))?;
    let grid = parse_header(h, hl)?;
    let n = grid.n_bins();
    let mut values = Array2::zeros((n, n));
    let mut last = hl;
    for i in 0..n {
        let (ln, line) =
            lines.next().ok_or_else(|| parse_err(last + 1, format!("expected {n} rows, found {i}")))?;
        let row = parse_row(line, ln, n)?;
        values.row_mut(i).assign(&Array1::from(row));
        last = ln;
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "unexpected extra row"));
    }
    CoincidenceMap::new(grid, values).map_err(|e| parse_err(last, e.to_string()))
}

pub fn spectrum_to_string(s: &Spectrum1D) -> String {
    let mut out = header(s.grid());
    out.push('\n');
    write_row(&mut out, s.values().iter());
    out
}

pub fn spectrum_from_str(text: &str) -> Result<Spectrum1D> {
    let mut lines = content_lines(text);
    let (hl, h) = lines.next().ok_or_else(|| parse_err(1, "empty spectrum file"))?;
    let grid = parse_header(h, hl)?;
    let (ln, line) = lines.next().ok_or_else(|| parse_err(hl + 1, "missing value line"))?;
    let row = parse_row(line, ln, grid.n_bins())?;
    if let Some((extra, _)) = lines.next() {
        return Err(parse_err(extra, "unexpected extra line"));
    }
    Spectrum1D::new(grid, Array1::from(row)).map_err(|e| parse_err(ln, e.to_string()))
}

/// Either kind of grid file, told apart by the number of value rows.
#[derive(Debug, Clone)]
pub enum GridData {
    Spectrum(Spectrum1D),
    Map(CoincidenceMap),
}

pub fn data_from_str(text: &str) -> Result<GridData> {
    let rows = content_lines(text).count();
    if rows == 2 {
        spectrum_from_str(text).map(GridData::Spectrum)
    } else {
        map_from_str(text).map(GridData::Map)
    }
}

pub fn write_map(path: impl AsRef<Path>, map: &CoincidenceMap) -> Result<()> {
    std::fs::write(path, map_to_string(map))?;
    Ok(())
}

pub fn read_map(path: impl AsRef<Path>) -> Result<CoincidenceMap> {
    map_from_str(&std::fs::read_to_string(path)?)
}

pub fn write_spectrum(path: impl AsRef<Path>, s: &Spectrum1D) -> Result<()> {
    std::fs::write(path, spectrum_to_string(s))?;
    Ok(())
}

pub fn read_spectrum(path: impl AsRef<Path>) -> Result<Spectrum1D> {
    spectrum_from_str(&std::fs::read_to_string(path)?)
}

pub fn read_data(path: impl AsRef<Path>) -> Result<GridData> {
    data_from_str(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout() {
        let g = EnergyGrid::new(-1.2, 1.2, 1, 2).unwrap();
        let s = header(&g);
        assert!(s.starts_with("# e_min=-1.2"));
        assert!(s.contains(" n_bins=3 "));
    }

    #[test]
    fn reports_line_numbers() {
        let text = "# e_min=0 delta=1.2 n_bins=3 hbar_omega=1.2\n1 2 3\n4 x 6\n7 8 9\n";
        match map_from_str(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let short = "# e_min=0 delta=1.2 n_bins=3 hbar_omega=1.2\n1 2 3\n4 5\n";
        assert!(matches!(map_from_str(short), Err(Error::Parse { line: 3, .. })));
        let bad_header = "e_min=0\n1\n";
        assert!(matches!(map_from_str(bad_header), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn spectrum_round_trip() {
        let g = EnergyGrid::new(-2.4, 1.2, 3, 4).unwrap();
        let s = Spectrum1D::from_fn(g, |e| (-e * e).exp() / 3.0).unwrap();
        assert_eq!(spectrum_from_str(&spectrum_to_string(&s)).unwrap(), s);
        assert!(matches!(data_from_str(&spectrum_to_string(&s)).unwrap(), GridData::Spectrum(_)));
    }

    proptest! {
        #[test]
        fn map_round_trip_is_exact(vals in proptest::collection::vec(-1e300f64..1e300, 9)) {
            let g = EnergyGrid::new(-1.2e-3, 1.2e-3, 1, 2).unwrap();
            let m = CoincidenceMap::new(g, Array2::from_shape_vec((3, 3), vals).unwrap()).unwrap();
            let back = map_from_str(&map_to_string(&m)).unwrap();
            prop_assert_eq!(back, m);
        }
    }
}
