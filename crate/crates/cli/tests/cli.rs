use std::path::Path;
use std::process::{Command, Output};

fn pairwalk(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairwalk")).args(args).current_dir(cwd).output().expect("spawn pairwalk")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .parse()
        .unwrap()
}

const GRID: [&str; 4] = ["--grid", "k=4", "span=22", "emin=-13.2"];

fn synth(dir: &Path) {
    let mut args = vec!["synth"];
    args.extend(GRID);
    args.extend([
        "--g", "0.7,1.1", "--f", "0.3", "--alpha", "0.91", "--beta", "0.05", "--gamma", "-0.08", "--sigma", "0.2",
        "--ratio", "0.3", "--nodes", "9", "--out", "syn",
    ]);
    let o = pairwalk(&args, dir);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn separable_at_zero_coupling_reproduces_reference() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path());
    let o = pairwalk(
        &["simulate", "--reference", "syn/reference.txt", "--model", "separable", "--g", "0", "--out", "sim"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let a = std::fs::read(dir.path().join("syn/reference.txt")).unwrap();
    let b = std::fs::read(dir.path().join("sim/separable_g1.txt")).unwrap();
    assert_eq!(a, b);
    let manifest = std::fs::read_to_string(dir.path().join("sim/manifest.txt")).unwrap();
    assert!(manifest.contains("[separable_g1.txt]"));
    assert!(manifest.contains("input.reference=/"));
}

#[test]
fn synth_then_fit_recovers_truth() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path());
    let o = pairwalk(
        &[
            "fit", "--reference", "syn/reference.txt", "--obs", "syn/obs_1mW.txt,syn/obs_2mW.txt", "--g", "0.6,1.0",
            "--nodes", "9", "--out", "fit",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("fit/fit.txt")).unwrap();
    let param = |name: &str| -> f64 {
        let line = text.lines().find(|l| l.starts_with(&format!("{name} "))).unwrap();
        line.split_whitespace().nth(1).unwrap().parse().unwrap()
    };
    for (name, truth) in [("f", 0.3), ("alpha", 0.91), ("beta", 0.05), ("gamma", -0.08), ("g1", 0.7), ("g2", 1.1)] {
        assert!((param(name) - truth).abs() < 1e-6, "{name}: {}", param(name));
    }
    assert!(value(&text, "negativity") > 0.0);
    for f in ["covariance.csv", "residual_obs_1mW.txt", "minus_separable_obs_2mW.csv", "manifest.txt"] {
        assert!(dir.path().join("fit").join(f).exists(), "{f}");
    }
}

#[test]
fn malformed_map_exits_with_code_2_and_line_number() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path());
    let text = std::fs::read_to_string(dir.path().join("syn/reference.txt")).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let n = lines.len() - 2;
    lines[n] = "1.0 oops 2.0".into();
    std::fs::write(dir.path().join("bad.txt"), lines.join("\n")).unwrap();
    let o = pairwalk(&["simulate", "--reference", "bad.txt", "--g", "0", "--out", "sim"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains(&format!("line {}", n + 1)), "{}", stderr(&o));
}

#[test]
fn bad_config_value_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.txt"), "# sim\ngrid = span=22\n\ng = 0.5,abc\n").unwrap();
    let o = pairwalk(&["simulate", "--config", "c.txt"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("c.txt:4"), "{}", stderr(&o));
}

#[test]
fn unconverged_fit_exits_with_code_4_and_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path());
    let o = pairwalk(
        &["fit", "--reference", "syn/reference.txt", "--obs", "syn/obs_1mW.txt", "--max-iter", "1", "--nodes", "9", "--out", "fit"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    let text = std::fs::read_to_string(dir.path().join("fit/fit.txt")).unwrap();
    assert!(text.contains("converged=false"));
}

#[test]
fn single_electron_gas_has_zero_width() {
    let dir = tempfile::tempdir().unwrap();
    let o = pairwalk(&["gas", "--n-electrons", "1", "--t-end", "200", "--out", "g"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("g/diagnostics.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "width_fwhm").unwrap();
    let mut rows = 0;
    for l in lines {
        let v: f64 = l.split(',').nth(col).unwrap().parse().unwrap();
        assert_eq!(v, 0.0);
        rows += 1;
    }
    assert!(rows > 5);
}

#[test]
fn gas_runs_are_reproducible_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b", "c"] {
        let seed = if out == "c" { "8" } else { "3" };
        let o = pairwalk(&["gas", "--n-electrons", "12", "--t-end", "300", "--seed", seed, "--out", out], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let read = |d: &str| std::fs::read(dir.path().join(d).join("diagnostics.txt")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
}

#[test]
fn gas_config_file_errors_keep_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("gas.txt"), "t_end = 100\nn_electrons = 4\nfwhm = wide\n").unwrap();
    let o = pairwalk(&["gas", "--config", "gas.txt"], dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("gas.txt:3"), "{}", stderr(&o));
}

#[test]
fn bell_negativity() {
    let dir = tempfile::tempdir().unwrap();
    let o = pairwalk(&["negativity", "--lambdas", "0.5,0.5"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    assert!((value(&stdout(&o), "negativity") - 0.5).abs() < 1e-12);
    let o = pairwalk(&["negativity", "--lambdas", "1.0", "--f", "0.7"], dir.path());
    assert_eq!(value(&stdout(&o), "negativity"), 0.0);
}

#[test]
fn visibility_of_reference_and_modulated_maps() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path());
    let v = |file: &str| {
        let o = pairwalk(&["visibility", "--input", file], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
        value(&stdout(&o), "visibility")
    };
    let v0 = v("syn/reference.txt");
    let v1 = v("syn/obs_2mW.txt");
    assert!((0.0..=1.0).contains(&v0) && (0.0..=1.0).contains(&v1));
    assert!(v0 > 0.99, "{v0}");
}
