use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use latticewave::io::{parse_scenario_str, read_matrix, Scenario};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/scenarios").join(name)
}

fn latticewave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latticewave"))
        .args(args)
        .env_remove("LATTICEWAVE_OUT")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_series(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|s| s.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn selftest_passes() {
    let out = latticewave(&["selftest", "--seed", "7"]);
    let text = stdout(&out);
    assert!(out.status.success(), "{text}");
    assert!(text.lines().count() >= 8);
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
}

#[test]
fn search_bundle_reproduces_peak_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = latticewave(&["run", scenario("search.json").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let (header, rows) = read_series(&dir.path().join("series.csv"));
    assert_eq!(header, ["step", "p(15,15)", "norm"]);
    let peak = rows.iter().max_by(|a, b| a[1].total_cmp(&b[1])).unwrap();
    let spectral: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("spectral.json")).unwrap()).unwrap();
    let eps = spectral["epsilon"].as_f64().unwrap();
    let predicted = (std::f64::consts::PI / (2.0 * eps)).round();
    assert!((peak[0] - predicted).abs() / predicted <= 0.15);
    assert!(peak[1] > 0.2);
    assert_eq!(rows.len() as u64, 1 + spectral["t_s"].as_u64().unwrap());

    let heat = read_matrix(&dir.path().join("heatmaps/step_000015.csv")).unwrap();
    assert_eq!((heat.len(), heat[0].len()), (31, 31));
    let total: f64 = heat.iter().flatten().sum();
    assert!((total - 1.0).abs() < 1e-12);

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "ok");
    assert_eq!(manifest["schema_version"], 1);
    assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    let resolved = parse_scenario_str(&manifest["config"].to_string(), true).unwrap();
    let original: Scenario = latticewave::io::parse_scenario(&scenario("search.json"), true).unwrap().0;
    assert_eq!(resolved, original);
}

#[test]
fn single_thread_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = latticewave(&[
            "run",
            scenario("relocation.json").to_str().unwrap(),
            "--threads",
            "1",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
    }
    let sa = fs::read(a.path().join("series.csv")).unwrap();
    let sb = fs::read(b.path().join("series.csv")).unwrap();
    assert_eq!(sa, sb);
    let threaded = tempfile::tempdir().unwrap();
    let out = latticewave(&[
        "run",
        scenario("relocation.json").to_str().unwrap(),
        "--threads",
        "3",
        "--out",
        threaded.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(fs::read(threaded.path().join("series.csv")).unwrap(), sa);
}

#[test]
fn environment_overrides_out_flag() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_latticewave"))
        .args(["run", scenario("transfer.json").to_str().unwrap(), "--out", flag_dir.path().to_str().unwrap()])
        .env("LATTICEWAVE_OUT", env_dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(env_dir.path().join("manifest.json").exists());
    assert!(!flag_dir.path().join("manifest.json").exists());
    let (header, _) = read_series(&env_dir.path().join("series.csv"));
    assert_eq!(header.last().unwrap(), "fidelity_2");
}

#[test]
fn failed_runs_still_write_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    fs::write(
        &file,
        r#"{"lattice": {"d": 2, "n": 31}, "marks": [{"vertex": [31, 0]}], "scenario": {"kind": "search"}}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let out = latticewave(&["run", file.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("coordinate out of range [0, 31)"), "{err}");
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "error");
    assert!(!out_dir.join("series.csv").exists());

    // a protocol failure after resolution
    fs::write(
        &file,
        r#"{"lattice": {"d": 2, "n": 9}, "marks": [{"vertex": [1, 1]}], "scenario": {"kind": "transfer", "steps": 5}}"#,
    )
    .unwrap();
    let out = latticewave(&["run", file.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(!out.status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["status"], "error");
    assert!(manifest["config"].is_object());
}

#[test]
fn strict_mode_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("typo.json");
    fs::write(
        &file,
        r#"{"lattice": {"d": 2, "n": 9}, "marks": [{"vertex": [1, 1]}], "scenario": {"kind": "search", "stpes": 3}}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("out");
    let strict = latticewave(&["run", file.to_str().unwrap(), "--strict", "--out", out_dir.to_str().unwrap()]);
    assert!(!strict.status.success());
    assert!(String::from_utf8_lossy(&strict.stderr).contains("scenario.stpes"));
    let lenient = latticewave(&["run", file.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert!(lenient.status.success());
    assert!(String::from_utf8_lossy(&lenient.stderr).contains("warning: ignoring unknown key `scenario.stpes`"));
}

#[test]
fn schema_errors_name_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.json");
    fs::write(&file, "{\n  \"lattice\": {\"d\": 2, \"n\": -3},\n  \"marks\": [],\n  \"scenario\": {\"kind\": \"search\"}\n}\n").unwrap();
    let out = latticewave(&["run", file.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2") && err.contains("lattice.n"), "{err}");
}

#[test]
fn spectrum_band_table() {
    let out = latticewave(&["spectrum", "--d", "2", "--n", "5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kappa_0,kappa_1,band,phase"));
    // two band branches plus 2(d - 1) flat phases per momentum
    assert_eq!(lines.count(), 25 * 4);
}

#[test]
fn spectrum_lambda_sweep_shows_the_crossing() {
    let dir = tempfile::tempdir().unwrap();
    let out = latticewave(&[
        "spectrum",
        "--d",
        "2",
        "--n",
        "11",
        "--lambda-sweep",
        "0:2:0.02",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(text, stdout(&out));
    let mut crossing = std::collections::BTreeMap::<String, Vec<f64>>::new();
    let mut lambdas = std::collections::BTreeSet::new();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        lambdas.insert(f[0].to_string());
        if f[2] == "1" {
            crossing.entry(f[0].to_string()).or_default().push(f[1].parse().unwrap());
        }
    }
    assert_eq!(lambdas.len(), 101);
    // the pair closest together sits at λ = 1
    let gap = |pair: &Vec<f64>| (pair[0] - pair[1]).abs();
    let (at, _) = crossing
        .iter()
        .filter(|(_, p)| p.len() == 2)
        .min_by(|a, b| gap(a.1).total_cmp(&gap(b.1)))
        .unwrap();
    assert!((at.parse::<f64>().unwrap() - 1.0).abs() < 1e-9, "{at}");
}

#[test]
fn sweep_over_sizes_writes_one_bundle_each() {
    let dir = tempfile::tempdir().unwrap();
    let out = latticewave(&[
        "sweep",
        scenario("transfer.json").to_str().unwrap(),
        "--n",
        "21,25",
        "--threads",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for label in ["n_21", "n_25"] {
        assert!(dir.path().join(label).join("manifest.json").exists());
        assert!(dir.path().join(label).join("series.csv").exists());
    }
    let summary = fs::read_to_string(dir.path().join("sweep_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
}

#[test]
fn sweep_reports_failures_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    // search refuses detuned marks
    let out = latticewave(&[
        "sweep",
        scenario("search.json").to_str().unwrap(),
        "--lambda",
        "0.9:1.0:0.1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(!out.status.success());
    let summary = fs::read_to_string(dir.path().join("sweep_summary.csv")).unwrap();
    assert!(summary.contains("error") && summary.contains("ok"));
}

#[test]
fn usage_errors() {
    assert!(!latticewave(&["frobnicate"]).status.success());
    assert!(!latticewave(&["spectrum", "--d", "2"]).status.success());
    assert!(!latticewave(&["run", "/nonexistent/scenario.json", "--out", "/tmp/x"]).status.success());
}
