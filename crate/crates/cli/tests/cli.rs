use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SMALL_CONFIG: &str = r#"{
  "datasets": [
    { "generator": "lattice", "n": 64 },
    { "generator": "normal", "n": 60, "mu": 0.0, "sigma": 1.0 },
    { "generator": "uniform", "n": 60, "a": 0.0, "b": 1.0 },
    { "generator": "ode", "system": "lorenz", "sigma": 10.0, "rho": 28.0, "beta": 2.6666666666666665,
      "initial": [0.0, -0.01, 9.0], "dt": 0.01, "steps": 600, "subsample_stride": 10 }
  ],
  "groups": [
    { "name": "points", "datasets": ["lattice", "normal", "uniform"] },
    { "name": "flows", "datasets": ["lorenz", "normal"] }
  ],
  "grid": { "start": 0.05, "step": 0.05, "stop": 1.05 },
  "realizations": 3
}"#;

fn hyperfilt(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_hyperfilt"))
        .args(args)
        .env("HYPERFILT_THREADS", "2")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "hyperfilt {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

struct Workspace {
    _dir: TempDir,
    config: PathBuf,
    out: PathBuf,
}

impl Workspace {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        let config = dir.path().join("run.json");
        fs::write(&config, SMALL_CONFIG).unwrap();
        let out = dir.path().join("out");
        Workspace {
            _dir: dir,
            config,
            out,
        }
    }

    fn run(&self, command: &str, extra: &[&str]) -> Output {
        let mut args = vec![
            command,
            "--config",
            self.config.to_str().unwrap(),
            "--out",
            self.out.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        hyperfilt(&args)
    }

    fn full_run(&self, extra: &[&str]) {
        for command in ["generate", "analyze", "quantify", "compare"] {
            self.run(command, extra);
        }
    }
}

fn sorted_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

#[test]
fn generate_writes_one_file_per_realization() {
    let ws = Workspace::new();
    ws.run("generate", &[]);
    let files = sorted_files(&ws.out.join("points"));
    let mut expected: Vec<String> = ["lattice", "lorenz", "normal", "uniform"]
        .iter()
        .flat_map(|l| (0..3).map(move |k| format!("{l}_{k}.csv")))
        .collect();
    expected.sort();
    assert_eq!(files, expected);

    let lattice = read_csv(&ws.out.join("points/lattice_0.csv"));
    assert_eq!(lattice[0], ["x1", "x2", "x3"]);
    assert_eq!(lattice.len(), 65);
    assert_eq!(read_csv(&ws.out.join("points/lorenz_2.csv")).len(), 61);
}

#[test]
fn default_lattice_has_a_thousand_points() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    hyperfilt(&[
        "generate",
        "--realizations",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(out.join("points/lattice_0.csv")).unwrap();
    assert_eq!(text.lines().count(), 1001);
    assert!(!text.contains('\r'));
    assert_eq!(sorted_files(&out.join("points")).len(), 9);
}

#[test]
fn reruns_are_byte_identical() {
    let first = Workspace::new();
    let second = Workspace::new();
    first.full_run(&[]);
    second.full_run(&[]);
    for sub in ["points", "curves", "tables", "distances"] {
        let names = sorted_files(&first.out.join(sub));
        assert_eq!(names, sorted_files(&second.out.join(sub)));
        for name in names {
            let a = fs::read(first.out.join(sub).join(&name)).unwrap();
            let b = fs::read(second.out.join(sub).join(&name)).unwrap();
            assert_eq!(a, b, "{sub}/{name} differs between runs");
        }
    }
}

#[test]
fn seed_changes_random_clouds_only() {
    let a = Workspace::new();
    let b = Workspace::new();
    a.run("generate", &["--seed", "1"]);
    b.run("generate", &["--seed", "2"]);
    let read = |ws: &Workspace, f: &str| fs::read(ws.out.join("points").join(f)).unwrap();
    assert_eq!(read(&a, "lattice_0.csv"), read(&b, "lattice_0.csv"));
    assert_ne!(read(&a, "normal_0.csv"), read(&b, "normal_0.csv"));
    assert_ne!(read(&a, "lorenz_0.csv"), read(&b, "lorenz_0.csv"));
}

#[test]
fn analyze_writes_curves_and_summaries_per_metric() {
    let ws = Workspace::new();
    ws.run("generate", &[]);
    ws.run("analyze", &[]);
    let files = sorted_files(&ws.out.join("curves"));
    let summaries: Vec<_> = files
        .iter()
        .filter(|f| f.starts_with("lattice_") && f.ends_with("_summary.csv"))
        .collect();
    assert_eq!(summaries.len(), 5);
    assert_eq!(files.len(), 4 * 5 * 2);

    let summary = read_csv(&ws.out.join("curves/normal_euclidean_summary.csv"));
    assert_eq!(summary[0], ["r", "mu", "sigma"]);
    assert_eq!(summary.len(), 1 + 21);
    // the last radius exceeds every normalized distance
    assert_eq!(summary[21][1], "1");
    assert_eq!(summary[21][2], "0");

    let ensemble = read_csv(&ws.out.join("curves/normal_euclidean.csv"));
    assert_eq!(ensemble[0], ["realization", "r", "delta_e"]);
    assert_eq!(ensemble.len(), 1 + 3 * 21);
}

#[test]
fn single_realization_has_zero_sigma() {
    let ws = Workspace::new();
    ws.run("generate", &["--realizations", "1"]);
    ws.run("analyze", &["--realizations", "1", "--metric", "cityblock"]);
    let files = sorted_files(&ws.out.join("curves"));
    assert_eq!(files.len(), 4 * 2);
    for name in files.iter().filter(|f| f.ends_with("_summary.csv")) {
        for row in &read_csv(&ws.out.join("curves").join(name))[1..] {
            assert_eq!(row[2], "0", "{name}");
        }
    }
}

#[test]
fn quantify_table_has_deterministic_lattice() {
    let ws = Workspace::new();
    ws.run("generate", &[]);
    ws.run("analyze", &[]);
    let stdout = String::from_utf8(ws.run("quantify", &[]).stdout).unwrap();
    assert!(stdout.starts_with("dataset,metric,L_mean,L_std,S_mean,S_std\n"));

    let table = read_csv(&ws.out.join("tables/quantifiers.csv"));
    assert_eq!(
        table[0],
        ["dataset", "metric", "L_mean", "L_std", "S_mean", "S_std"]
    );
    assert_eq!(table.len(), 1 + 4 * 5);
    for row in table.iter().filter(|r| r[0] == "lattice") {
        assert_eq!(row[3], "0");
        assert_eq!(row[5], "0");
    }
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(ws.out.join("tables/quantifiers.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 20);
}

#[test]
fn compare_matrices_are_symmetric_with_zero_diagonal() {
    let ws = Workspace::new();
    ws.full_run(&["--metric", "euclidean", "--metric", "parabolic"]);
    let files: Vec<String> = sorted_files(&ws.out.join("distances"))
        .into_iter()
        .filter(|f| f.ends_with(".csv"))
        .collect();
    // 2 groups × 2 metrics × 2 quantifiers
    assert_eq!(files.len(), 8);
    for name in &files {
        let rows = read_csv(&ws.out.join("distances").join(name));
        let k = rows.len() - 1;
        assert_eq!(rows[0].len(), k + 1);
        assert_eq!(rows[0][0], "label");
        let value = |i: usize, j: usize| rows[i + 1][j + 1].parse::<f64>().unwrap();
        for i in 0..k {
            assert_eq!(rows[i + 1][0], rows[0][i + 1]);
            assert_eq!(value(i, i), 0.0, "{name}");
            for j in 0..k {
                assert_eq!(value(i, j), value(j, i), "{name}");
                assert!(value(i, j) >= 0.0);
            }
        }
    }
    let only_points = Workspace::new();
    only_points.full_run(&["--metric", "chebyshev"]);
    only_points.run("compare", &["--metric", "chebyshev", "--group", "flows"]);
    assert!(sorted_files(&only_points.out.join("distances"))
        .iter()
        .any(|f| f.starts_with("flows_chebyshev")));
}

#[test]
fn show_config_reflects_overrides() {
    let out = hyperfilt(&[
        "show-config",
        "--metric",
        "minkowski:4",
        "--grid",
        "0.1:0.1:1.1",
        "--realizations",
        "7",
        "--seed",
        "42",
        "--no-normalize",
        "--spacing",
        "grid",
    ]);
    let config: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(config["realizations"], 7);
    assert_eq!(config["base_seed"], 42);
    assert_eq!(config["normalize"], false);
    assert_eq!(config["grid"]["stop"], 1.1);
    assert_eq!(config["metrics"].as_array().unwrap().len(), 1);
    assert_eq!(config["metrics"][0]["p"], 4.0);
    assert_eq!(config["datasets"].as_array().unwrap().len(), 9);

    let full: serde_json::Value =
        serde_json::from_slice(&hyperfilt(&["show-config", "--paper-scale"]).stdout).unwrap();
    assert_eq!(full["realizations"], 100);
}

#[test]
fn analyze_without_generated_points_fails_cleanly() {
    let ws = Workspace::new();
    let out = Command::new(env!("CARGO_BIN_EXE_hyperfilt"))
        .args(["analyze", "--config", ws.config.to_str().unwrap(), "--out"])
        .arg(&ws.out)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("lattice_0.csv"));
}

#[test]
fn bad_arguments_are_rejected() {
    for args in [
        vec!["show-config", "--metric", "hamming"],
        vec!["show-config", "--grid", "1:0.1"],
        vec!["show-config", "--spacing", "log"],
    ] {
        let out = Command::new(env!("CARGO_BIN_EXE_hyperfilt"))
            .args(&args)
            .output()
            .unwrap();
        assert!(!out.status.success(), "{args:?} should fail");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_hyperfilt"))
        .args(["show-config"])
        .env("HYPERFILT_THREADS", "0")
        .output()
        .unwrap();
    assert!(!out.status.success());
}
