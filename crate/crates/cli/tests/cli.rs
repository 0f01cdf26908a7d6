use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SMALL: &str = r#"{
    "seed": 3,
    "replicates": 12,
    "n_grid": [10, 100],
    "gap": { "n": 20, "m_max": 8 },
    "audit": { "sizes": [8], "seeds": 5 },
    "figure": { "points": 8, "phase_k": [1e6, 1e15], "phase_points": 200 }
}"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metric-bounds"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("config.json");
    fs::write(&path, SMALL).unwrap();
    path.to_str().unwrap().to_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn every_subcommand_writes_its_outputs() {
    let tmp = TempDir::new().unwrap();
    let config = small_config(tmp.path());
    let cases: [(&[&str], &[&str]); 8] = [
        (&["bounds"], &["bounds.csv", "bounds.json", "bounds_wide.csv", "bounds_rates.csv"]),
        (&["concentration"], &["concentration.csv", "concentration.json"]),
        (&["gap"], &["gap.csv", "gap.json"]),
        (&["embed-audit"], &["embed-audit.csv", "embed-audit.json"]),
        (&["figure", "risk-bound-small"], &["risk-bound-small.csv", "risk-bound-small.gp", "risk-bound-small_table.csv"]),
        (&["figure", "risk-bound-large"], &["risk-bound-large.csv", "risk-bound-large.gp"]),
        (&["figure", "phase-diagram"], &["phase-diagram.csv", "phase-diagram.gp", "phase-diagram_table.json"]),
        (&["wasserstein"], &["wasserstein.csv", "wasserstein.json", "coupling.csv"]),
    ];
    for (args, files) in cases {
        let out = tmp.path().join(args.join("_"));
        let mut full = vec!["--config", config.as_str()];
        full.extend_from_slice(args);
        let o = run(&out, &full);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let stdout = String::from_utf8_lossy(&o.stdout);
        assert!(stdout.contains("PASS"), "{args:?}: {stdout}");
        for f in files {
            assert!(out.join(f).is_file(), "{args:?} did not write {f}");
        }
    }
}

#[test]
fn long_form_csv_has_the_documented_columns() {
    let tmp = TempDir::new().unwrap();
    let config = small_config(tmp.path());
    assert_eq!(run(tmp.path(), &["--config", &config, "concentration"]).status.code(), Some(0));
    let csv = fs::read_to_string(tmp.path().join("concentration.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,replicate,statistic,value,bound,margin"));
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 6, "{line}");
        let (value, bound, margin): (f64, f64, f64) =
            (cols[3].parse().unwrap(), cols[4].parse().unwrap(), cols[5].parse().unwrap());
        assert_eq!(margin, bound - value, "{line}");
    }
    let json = read_json(&tmp.path().join("concentration.json"));
    assert_eq!(json["metadata"]["seed"], 3);
    assert_eq!(json["metadata"]["config_hash"].as_str().unwrap().len(), 64);
    assert!(json["metadata"]["timestamp"].is_u64());
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let tmp = TempDir::new().unwrap();
    let config = small_config(tmp.path());
    for cmd in ["concentration", "gap", "embed-audit"] {
        let mut seen = Vec::new();
        for threads in ["1", "4", "4"] {
            let out = tmp.path().join(format!("{cmd}-{threads}-{}", seen.len()));
            let o = run(&out, &["--config", &config, "--threads", threads, cmd]);
            assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
            seen.push(fs::read(out.join(format!("{cmd}.csv"))).unwrap());
        }
        assert!(seen.windows(2).all(|w| w[0] == w[1]), "{cmd} output differs between runs");
    }
}

#[test]
fn flags_override_the_config_file() {
    let tmp = TempDir::new().unwrap();
    let config = small_config(tmp.path());
    let o = run(tmp.path(), &["--config", &config, "--seed", "9", "--replicates", "4", "--delta", "0.1", "concentration"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json = read_json(&tmp.path().join("concentration.json"));
    assert_eq!(json["metadata"]["seed"], 9);
    let csv = fs::read_to_string(tmp.path().join("concentration.csv")).unwrap();
    // 4 replicates at each of the 2 grid points
    assert_eq!(csv.lines().filter(|l| l.split(',').nth(2) == Some("w")).count(), 8);

    // same settings from the file alone give the same bytes
    let merged = tmp.path().join("merged.json");
    let mut doc: Value = serde_json::from_str(SMALL).unwrap();
    doc["seed"] = 9.into();
    doc["replicates"] = 4.into();
    doc["delta"] = 0.1.into();
    fs::write(&merged, doc.to_string()).unwrap();
    let other = tmp.path().join("merged");
    assert_eq!(run(&other, &["--config", merged.to_str().unwrap(), "concentration"]).status.code(), Some(0));
    assert_eq!(csv, fs::read_to_string(other.join("concentration.csv")).unwrap());
}

#[test]
fn errors_exit_with_one() {
    let tmp = TempDir::new().unwrap();
    let o = run(tmp.path(), &["figure", "no-such-figure"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no-such-figure"));

    let bad = tmp.path().join("bad.json");
    fs::write(&bad, r#"{ "delta": 1.5 }"#).unwrap();
    let o = run(tmp.path(), &["--config", bad.to_str().unwrap(), "bounds"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("delta"));

    fs::write(&bad, r#"{ "replicatez": 3 }"#).unwrap();
    assert_eq!(run(tmp.path(), &["--config", bad.to_str().unwrap(), "bounds"]).status.code(), Some(1));

    let missing = tmp.path().join("missing.json");
    assert_eq!(run(tmp.path(), &["--config", missing.to_str().unwrap(), "bounds"]).status.code(), Some(1));
}

#[test]
fn failed_assertion_exits_with_two() {
    // the small-N figure over a large-N interval: Occam wins, so its
    // assertion fails but the outputs are still written
    let tmp = TempDir::new().unwrap();
    let path = tmp.path().join("config.json");
    fs::write(&path, r#"{ "figure": { "small": [1e16, 1e18], "points": 5 } }"#).unwrap();
    let o = run(tmp.path(), &["--config", path.to_str().unwrap(), "figure", "risk-bound-small"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
    assert!(tmp.path().join("risk-bound-small.csv").is_file());
}
