//! End-to-end checks of the command-line surface: subcommands, exit codes,
//! configuration precedence, and the report file contracts.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semilab"))
}

fn tmp(tag: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(tag);
    std::fs::create_dir_all(&dir).expect("create tmp dir");
    dir
}

#[test]
fn list_prints_the_whole_registry() {
    let out = bin().arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8, "one line per scenario:\n{text}");
    for name in [
        "ex4_1",
        "ex4_2a",
        "ex7_1",
        "ex7_2",
        "ex9_1",
        "ex9_2",
        "heat_neumann",
        "heat_dirichlet",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn list_json_is_machine_readable() {
    let out = bin().args(["list", "--json"]).output().unwrap();
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let arr = parsed.as_array().unwrap();
    assert_eq!(arr.len(), 8);
    assert!(arr
        .iter()
        .all(|d| d.get("name").is_some() && d.get("description").is_some()));
}

#[test]
fn unknown_subcommand_prints_usage_and_fails() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("USAGE"), "usage text expected, got {err}");
}

#[test]
fn configuration_errors_exit_with_one() {
    let out = bin().args(["run", "no_such_scenario"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = bin()
        .args(["run", "heat_neumann", "--set", "n=100000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = bin()
        .args(["run", "ex4_1", "--set", "L=3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "ex4_1 has no L parameter");

    let out = bin()
        .args(["run", "heat_neumann", "--set", "bogus=1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn single_value_sweep_is_rejected() {
    let dir = tmp("sweep-single");
    let out = bin()
        .args(["sweep", "heat_dirichlet", "--param", "L", "--values", "1"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_marks_failed_rows_and_continues() {
    let dir = tmp("sweep-failed-row");
    // 10.5 is not an integral grid size; the row must be marked and the
    // other rows still computed, with exit code 2 flagging the failure.
    let out = bin()
        .args([
            "sweep",
            "heat_dirichlet",
            "--param",
            "n",
            "--values",
            "10.5,50,100",
        ])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let csv = std::fs::read_to_string(dir.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4, "header plus three rows:\n{csv}");
    assert!(lines[1].contains("error:config"));
    assert!(lines[2].ends_with(",ok"));
    assert!(lines[3].ends_with(",ok"));
}

#[test]
fn run_writes_the_three_report_files() {
    let dir = tmp("run-files");
    let out = bin()
        .args(["run", "heat_neumann", "--set", "n=60", "--set", "points=6"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    for f in ["profile.csv", "scalars.csv", "summary.json"] {
        assert!(dir.join(f).exists(), "{f} missing");
    }
    let profile = std::fs::read_to_string(dir.join("profile.csv")).unwrap();
    let lines: Vec<&str> = profile.lines().collect();
    assert_eq!(lines[0], "t,distance,min_entry");
    assert_eq!(lines.len(), 7, "header plus six sampled times");
    assert!(!profile.contains('\r'), "LF line endings only");

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["scenario"], "heat_neumann");
    assert_eq!(summary["params"]["n"], 60);
    let verdicts = summary["verdicts"].as_array().unwrap();
    assert!(verdicts.iter().all(|v| v["pass"] == true), "{verdicts:?}");
}

/// Every number appearing anywhere in summary.json must also be present in a
/// CSV; the long-form scalars table is that CSV.
#[test]
fn every_summary_number_lands_in_a_csv() {
    let dir = tmp("run-scalars");
    let status = bin()
        .args(["run", "ex9_1", "--set", "n=40", "--set", "points=6"])
        .arg("--out")
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());

    let scalars = std::fs::read_to_string(dir.join("scalars.csv")).unwrap();
    let mut csv_numbers: BTreeSet<u64> = BTreeSet::new();
    for line in scalars.lines().skip(1) {
        let value = line.split(',').nth(1).unwrap();
        csv_numbers.insert(value.parse::<f64>().unwrap().to_bits());
    }

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    let mut missing = Vec::new();
    collect_numbers(&summary, "", &mut |path, x| {
        // Booleans are stored as 0/1 scalars and strings are not numbers.
        if !csv_numbers.contains(&x.to_bits()) {
            missing.push(format!("{path} = {x}"));
        }
    });
    assert!(
        missing.is_empty(),
        "numbers absent from scalars.csv: {missing:?}"
    );
}

fn collect_numbers(v: &serde_json::Value, path: &str, f: &mut impl FnMut(&str, f64)) {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(x) = n.as_f64() {
                f(path, x);
            }
        }
        serde_json::Value::Bool(b) => f(path, if *b { 1.0 } else { 0.0 }),
        serde_json::Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                collect_numbers(item, &format!("{path}[{i}]"), f);
            }
        }
        serde_json::Value::Object(map) => {
            for (k, item) in map {
                collect_numbers(item, &format!("{path}.{k}"), f);
            }
        }
        _ => {}
    }
}

#[test]
fn config_file_is_overridden_by_set_flags() {
    let dir = tmp("run-precedence");
    let cfg_path = dir.join("run.cfg");
    std::fs::write(&cfg_path, "n=40\npoints=6\n").unwrap();
    let out_dir = dir.join("out");
    let status = bin()
        .args(["run", "heat_neumann", "--config"])
        .arg(&cfg_path)
        .args(["--set", "n=80"])
        .arg("--out")
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["params"]["n"], 80, "--set beats the config file");
    assert_eq!(summary["params"]["points"], 6, "file value survives");
}

#[test]
fn parallel_sweep_matches_sequential_sweep() {
    let seq_dir = tmp("sweep-seq");
    let par_dir = tmp("sweep-par");
    let args = [
        "sweep",
        "heat_dirichlet",
        "--param",
        "L",
        "--values",
        "1,2,4",
    ];
    let status = bin()
        .args(args)
        .arg("--out")
        .arg(&seq_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let status = bin()
        .args(args)
        .arg("--out")
        .arg(&par_dir)
        .env("SEMILAB_WORKERS", "3")
        .status()
        .unwrap();
    assert!(status.success());
    let seq = std::fs::read(seq_dir.join("sweep.csv")).unwrap();
    let par = std::fs::read(par_dir.join("sweep.csv")).unwrap();
    assert_eq!(seq, par, "worker count must not change the table");
}

/// The endpoint-coupled scenario's fitted rate agrees with its spectral gap.
#[test]
fn ex9_1_fitted_rate_matches_gap() {
    let dir = tmp("ex9-rate");
    let status = bin()
        .args(["run", "ex9_1"])
        .arg("--out")
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    let gap = summary["spectral"]["gap"].as_f64().unwrap();
    let rate = summary["convergence"]["fitted_rate"].as_f64().unwrap();
    assert!(
        (rate - gap).abs() <= 0.10 * gap,
        "fitted {rate} vs gap {gap}"
    );
}
