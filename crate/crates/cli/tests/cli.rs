use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use switchrun_cli::{Format, Table};

fn switchrun(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_switchrun"))
        .args(args)
        .env_remove("SWITCHRUN_OUT")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("experiments.toml");
    fs::write(&path, text).unwrap();
    path.display().to_string()
}

const SMALL: &str = "\
[fair]
p = 0.5
N_grid = [100, 1000]
trials = 20
seed = 11
gamma_a = 1.0

[tilted]
p = 0.25
N_grid = [500]
trials = 5
seed = 3
";

#[test]
fn exact_examples() {
    let out = switchrun(&["exact", "--N", "4", "--K", "2", "--p", "0.5"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out).lines().nth(1),
        Some("0.125,0.125,0.353553390593,OK")
    );

    let out = switchrun(&["exact", "--N", "3", "--K", "2", "--p", "0.5"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().nth(1), Some(",0.25,,NA"));

    let out = switchrun(&["exact", "--N", "4", "--K", "1", "--p", "0.5"]);
    let row = stdout(&out);
    let exact = row
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .to_string();
    assert_eq!(exact, "0");
}

#[test]
fn usage_errors_exit_2_with_one_line() {
    for args in [
        &["exact", "--N", "4", "--K", "2", "--p", "1.5"][..],
        &["exact", "--N", "4", "--K", "2"],
        &["bounds", "--N", "9:3", "--K", "2", "--p", "0.5"],
        &["tables", "--table", "4"],
        &["simulate", "--config", "/nonexistent/config.toml"],
    ] {
        let out = switchrun(args);
        let code = out.status.code();
        if args[0] == "simulate" {
            assert_eq!(code, Some(1), "{args:?}");
        } else {
            assert_eq!(code, Some(2), "{args:?}: {}", stderr(&out));
        }
        assert!(out.stdout.is_empty());
    }
    let out = switchrun(&["exact", "--N", "4", "--K", "2", "--p", "0"]);
    assert_eq!(stderr(&out).lines().count(), 1);
}

#[test]
fn config_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(
        dir.path(),
        "[a]\np = 0.5\nN_grid = [10]\ntrials = 1\nseed = 1\nsede = 2\n",
    );
    let out = switchrun(&["simulate", "--config", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 6"), "{}", stderr(&out));
}

#[test]
fn bounds_csv_round_trips() {
    let out = switchrun(&["bounds", "--N", "20", "--K", "4", "--p", "0.3333"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert!(row[3].parse::<f64>().unwrap() <= row[5].parse::<f64>().unwrap());

    let out = switchrun(&["bounds", "--N", "4:40", "--K", "1:6", "--p", "0.3"]);
    let text = stdout(&out);
    let parsed = Table::from_csv("", &text).unwrap();
    assert_eq!(parsed.to_csv().unwrap(), text);
}

#[test]
fn gamma_prints_verdict_first() {
    let out = switchrun(&[
        "gamma", "--a", "2", "--b", "0", "--p", "0.5", "--trials", "0",
    ]);
    assert_eq!(stdout(&out), "Converges\n");
    let out = switchrun(&["gamma", "--a", "1.5", "--b", "-3", "--trials", "0"]);
    assert_eq!(stdout(&out), "Converges\n");
    let out = switchrun(&["gamma", "--a", "0.5", "--trials", "2", "--N", "2:2000"]);
    let text = stdout(&out);
    assert!(text.starts_with("Diverges\nrun,seed,hits,hit_fraction,first_hit,last_hit\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn gamma_takes_defaults_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), SMALL);
    let out = switchrun(&["gamma", "--config", &path]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("Diverges\n"));
    // `fair` sorts first: 20 runs over N in 100..=1000
    assert_eq!(text.lines().count(), 2 + 20);
}

#[test]
fn tables_formats() {
    let out = switchrun(&["tables", "--table", "2", "--format", "csv"]);
    assert_eq!(
        stdout(&out),
        "p,200,500,1000,2000,5000\n1/3,7,8,9,10,11\n1/4,6,7,8,9,10\n1/10,4,5,6,6,7\n"
    );
    let out = switchrun(&["tables", "--table", "2", "--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["rows"][0][5], 11);
    let out = switchrun(&["tables", "--table", "3", "--format", "md"]);
    assert!(stdout(&out).starts_with("### "));
}

#[test]
fn table3_runs_fall_in_the_desk_gate() {
    let out = switchrun(&["tables", "--table", "3", "--seed", "99"]);
    let table = Table::from_csv("", &stdout(&out)).unwrap();
    assert_eq!(table.rows.len(), 11);
    for row in &table.rows[..10] {
        let cell = row[1].render();
        let m: u64 = cell.rsplit("M_N=").next().unwrap().parse().unwrap();
        assert!((6..=18).contains(&m), "{cell}");
    }
}

#[test]
fn simulate_writes_reports_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out_dir = dir.path().join("run");
    let out = switchrun(&[
        "simulate",
        "--config",
        &config,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    for name in [
        "fair.report.json",
        "fair.trials.csv",
        "fair.summary.csv",
        "tilted.report.json",
        "tilted.trials.csv",
        "tilted.summary.csv",
        "simulate.manifest.json",
    ] {
        assert!(out_dir.join(name).is_file(), "{name}");
    }
    let raw = fs::read_to_string(out_dir.join("fair.trials.csv")).unwrap();
    assert!(raw.starts_with("p,N,trial,M,ratio\n"));
    assert_eq!(raw.lines().count(), 1 + 2 * 20);

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("simulate.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 6);
    assert_eq!(manifest["parameters"]["experiments"][0]["name"], "fair");
}

#[test]
fn overrides_apply_to_every_experiment() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), SMALL);
    let out = switchrun(&[
        "simulate", "--config", &config, "--trials", "3", "--seed", "5", "--format", "json",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.matches("seed = 5").count(), 2, "{text}");
    let out = switchrun(&["simulate", "--config", &config, "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn replay_matches_and_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("t1");
    let out = switchrun(&[
        "tables",
        "--table",
        "1",
        "--seed",
        "4",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let manifest = out_dir.join("tables.manifest.json");

    let again = dir.path().join("t1-again");
    let out = switchrun(&[
        "replay",
        manifest.to_str().unwrap(),
        "--out",
        again.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "match    table1.csv\n");
    assert_eq!(
        fs::read(out_dir.join("table1.csv")).unwrap(),
        fs::read(again.join("table1.csv")).unwrap()
    );

    let text = fs::read_to_string(&manifest)
        .unwrap()
        .replacen("\"seed\": 4", "\"seed\": 5", 1);
    fs::write(&manifest, text).unwrap();
    let out = switchrun(&["replay", manifest.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "only the recorded seed field changed"
    );

    let text = fs::read_to_string(&manifest).unwrap().replace(
        "\"seed\": 4,\n    \"format\"",
        "\"seed\": 6,\n    \"format\"",
    );
    fs::write(&manifest, text).unwrap();
    let out = switchrun(&["replay", manifest.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", stdout(&out));
    assert_eq!(stdout(&out), "MISMATCH table1.csv\n");
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_switchrun"))
        .args([
            "exact", "--N", "10", "--K", "3", "--p", "0.4", "--format", "md",
        ])
        .env("SWITCHRUN_OUT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("exact.md").is_file());
    assert!(dir.path().join("exact.manifest.json").is_file());
    let _ = Format::Md;
}
