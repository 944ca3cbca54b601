use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vancycles"))
}

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn problem(name: &str) -> PathBuf {
    root().join("problems").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_report(problem: &Path, extra: &[&str], out: &Path) -> (Output, Value) {
    let mut args = vec![
        "run",
        problem.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let o = run(&args);
    let v = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    (o, v)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn mu_quick_command() {
    for (f, mu) in [("x^2+y^3", "2"), ("x*y", "1")] {
        let o = run(&["mu", f]);
        assert!(o.status.success());
        assert_eq!(stdout(&o).trim(), mu);
    }
    let o = run(&["mu", "x", "--vars", "x,y"]);
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn other_quick_commands() {
    let o = run(&["polar", "x^2 + y^3", "x"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ideal"], serde_json::json!(["y^2"]));

    let o = run(&["conormal", "x", "--vars", "x,y"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["generators"], serde_json::json!(["w_y", "x"]));

    let o = run(&[
        "afpair",
        "",
        "x^2 - z*y^2",
        "x; y",
        "0,0,0",
        "--vars",
        "x,y,z",
    ]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], Value::Bool(false));
    assert!(v["witness"].as_str().unwrap().contains("w_z"));

    let o = run(&["afpair", "", "x*y", "x", "0,1", "--vars", "x,y"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], Value::Bool(true));
}

#[test]
fn xy_report_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("xy.json");
    let (o, v) = run_report(&problem("xy.json"), &["--no-cache"], &out);
    assert!(o.status.success());
    let origin = &v["certified"]["transfer"]["tables"][2];
    assert_eq!(origin["stratum"], "origin");
    assert_eq!(origin["b"], serde_json::json!({ "2": 1 }));
    for t in &v["certified"]["transfer"]["tables"].as_array().unwrap()[..2] {
        assert_eq!(t["b"], serde_json::json!({}));
    }
    assert_eq!(v["certified"]["index-check"]["check"]["passed"], true);
    assert!(v.get("timing").is_none());
    let golden = std::fs::read_to_string(fixture("xy_table.txt")).unwrap();
    assert_eq!(stdout(&o), golden);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    for (name, code) in [
        ("empty_strata.json", 1),
        ("wrong_dim.json", 1),
        ("witness_off_stratum.json", 1),
        ("malformed.json", 1),
        ("not_normal.json", 1),
        ("no_budget.json", 2),
    ] {
        let out = dir.path().join(name);
        let o = run(&[
            "run",
            fixture(name).to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--no-cache",
        ]);
        assert_eq!(o.status.code(), Some(code), "{name}");
        assert!(!o.stderr.is_empty(), "{name}");
    }
    let o = run(&["run", "/nonexistent/problem.json", "--no-cache"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&[
        "run",
        problem("xy.json").to_str().unwrap(),
        "--field",
        "modular:12",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn seeds_change_only_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let (_, va) = run_report(&problem("cusp.json"), &["--no-cache", "--seed", "3"], &a);
    let (_, vb) = run_report(&problem("cusp.json"), &["--no-cache", "--seed", "4"], &b);
    assert_eq!(va["certified"], vb["certified"]);
    assert_ne!(va["diagnostics"], vb["diagnostics"]);
    let c = dir.path().join("c.json");
    run_report(&problem("cusp.json"), &["--no-cache", "--seed", "3"], &c);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
}

#[test]
fn cache_states_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let c = cache.to_str().unwrap();
    let cold = dir.path().join("cold.json");
    let warm = dir.path().join("warm.json");
    let none = dir.path().join("none.json");
    run_report(&problem("xy.json"), &["--cache-dir", c], &cold);
    run_report(&problem("xy.json"), &["--cache-dir", c], &warm);
    run_report(&problem("xy.json"), &["--no-cache"], &none);
    let cold = std::fs::read(cold).unwrap();
    assert_eq!(cold, std::fs::read(warm).unwrap());
    assert_eq!(cold, std::fs::read(none).unwrap());
}

#[test]
fn corrupt_cache_entries_are_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let c = cache.to_str().unwrap();
    let first = dir.path().join("first.json");
    let (_, v1) = run_report(&problem("xy.json"), &["--cache-dir", c], &first);
    let mut corrupted = 0;
    for fan in std::fs::read_dir(&cache).unwrap() {
        for e in std::fs::read_dir(fan.unwrap().path()).unwrap() {
            let p = e.unwrap().path();
            let text = std::fs::read_to_string(&p).unwrap();
            let bad = if corrupted % 2 == 0 {
                text[..text.len() / 2].to_string()
            } else {
                text.replacen("\"basis\":[\"", "\"basis\":[\"1 + ", 1)
            };
            std::fs::write(&p, bad).unwrap();
            corrupted += 1;
        }
    }
    assert!(corrupted > 0);
    let second = dir.path().join("second.json");
    let (o, v2) = run_report(&problem("xy.json"), &["--cache-dir", c], &second);
    assert!(o.status.success());
    assert_eq!(v1["certified"], v2["certified"]);
    let warnings = v2["diagnostics"]["cache_warnings"].as_array().unwrap();
    assert!(!warnings.is_empty());
    let third = dir.path().join("third.json");
    let (_, v3) = run_report(&problem("xy.json"), &["--cache-dir", c], &third);
    assert!(v3["diagnostics"].get("cache_warnings").is_none());
    assert_eq!(v1, v3);
}

#[test]
fn modular_mode_is_confirmed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let (o, v) = run_report(
        &problem("cusp.json"),
        &["--no-cache", "--field", "modular:32003"],
        &out,
    );
    assert!(o.status.success());
    assert_eq!(v["diagnostics"]["modular_confirmation"]["agree"], true);
    assert_eq!(v["problem"]["field"], "modular:32003");
}

#[test]
fn timing_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let (_, v) = run_report(&problem("smooth.json"), &["--no-cache", "--timing"], &out);
    assert!(v["timing"]["total"].is_number());
}
