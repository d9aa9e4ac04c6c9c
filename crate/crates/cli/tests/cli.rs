use std::fs;
use std::process::{Command, Output};

fn su3lgt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_su3lgt")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = su3lgt(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Data lines of a CSV report, header first.
fn table(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| {
            csv::ReaderBuilder::new()
                .has_headers(false)
                .from_reader(l.as_bytes())
                .records()
                .next()
                .unwrap()
                .unwrap()
                .iter()
                .map(str::to_string)
                .collect()
        })
        .collect()
}

#[test]
fn vertex_counts_at_first_cutoff() {
    let rows = table(&stdout(&["count", "--trunc", "1"]));
    assert_eq!(rows[0], ["lambda", "three_point", "four_point"]);
    assert_eq!(rows[2], ["1", "19", "82"]);
}

#[test]
fn compile_emits_every_control_sector() {
    let rows = table(&stdout(&["compile", "--trunc", "1,3,3bar", "--dt", "0.1"]));
    assert_eq!(rows.len(), 28);
    let classes: std::collections::BTreeSet<&str> = rows[1..].iter().map(|r| r[1].as_str()).collect();
    assert_eq!(classes.len(), 8);
}

#[test]
fn two_plaquette_spectrum_sectors() {
    let rows = table(&stdout(&["spectrum", "--geometry", "two", "--trunc", "1,3,3bar"]));
    assert_eq!(rows.len(), 10);
    let count = |s: &str| rows.iter().filter(|r| r[0] == s).count();
    assert_eq!([count("++"), count("-+"), count("--"), count("+-")], [4, 2, 2, 1]);
}

#[test]
fn evolution_at_zero_time_is_the_initial_state() {
    let rows = table(&stdout(&["evolve", "--tmax", "0"]));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][1].parse::<f64>().unwrap(), 1.0);
}

#[test]
fn local_evolution_reports_zero_leakage() {
    let rows = table(&stdout(&["evolve", "--mode", "local", "--geometry", "two", "--trunc", "1,3,3bar", "--tmax", "0.3", "--dt", "0.1"]));
    assert_eq!(rows.len(), 5);
    assert!(rows[1..].iter().all(|r| r[3].parse::<f64>().unwrap() == 0.0));
}

#[test]
fn config_file_sits_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.ini");
    fs::write(&path, "subcommand = count\ntrunc = 2\nformat = json\n").unwrap();
    let p = path.to_str().unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&["--config", p])).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    let v: serde_json::Value = serde_json::from_str(&stdout(&["--config", p, "--trunc", "1"])).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
}

#[test]
fn unknown_keys_and_bad_values_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.ini");
    fs::write(&path, "subcommand = count\ncolour = red\n").unwrap();
    let out = su3lgt(&["--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
    assert_eq!(su3lgt(&["count", "--trunc", "nine"]).status.code(), Some(2));
    assert_eq!(su3lgt(&[]).status.code(), Some(2));
    assert_eq!(su3lgt(&["compile", "--trunc", "2"]).status.code(), Some(2));
}

#[test]
fn reruns_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        stdout(&["converge", "--lambdas", "1..4", "--g", "0.5,1", "--out", out.to_str().unwrap()]);
        fs::read(out).unwrap()
    };
    let a = run("a.csv");
    assert!(!a.is_empty());
    assert_eq!(a, run("b.csv"));
}

#[test]
fn json_output_carries_schema_and_subcommand() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&["su2-tail", "--g", "1", "--format", "json"])).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["subcommand"], "su2-tail");
    assert_eq!(v["columns"][0], "g");
}

#[test]
fn local_and_global_traces_agree_as_the_step_shrinks() {
    let global = table(&stdout(&["evolve", "--geometry", "two", "--trunc", "1,3,3bar", "--tmax", "0.6", "--dt", "0.01"]));
    let local = table(&stdout(&["evolve", "--mode", "local", "--geometry", "two", "--trunc", "1,3,3bar", "--tmax", "0.6", "--dt", "0.01"]));
    let worst = global[1..]
        .iter()
        .zip(&local[1..])
        .map(|(a, b)| {
            assert_eq!(a[0], b[0]);
            (a[2].parse::<f64>().unwrap() - b[2].parse::<f64>().unwrap()).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst < 1e-3, "{worst}");
}

#[test]
fn single_cutoff_sweep_is_its_own_reference() {
    let rows = table(&stdout(&["converge", "--lambdas", "3", "--g", "1"]));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][4].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn plaquette_counts_tabulate_nested_truncations() {
    let rows = table(&stdout(&["count", "--kind", "plaquette", "--trunc", "1,3,3bar,8,6,6bar"]));
    let got: Vec<(&str, &str)> = rows[2..].iter().map(|r| (r[1].as_str(), r[2].as_str())).collect();
    assert_eq!(got, [("81", "81"), ("529", "1018"), ("5937", "19594")]);
}
