use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const PI: &str = "3.141592653589793";

fn ncilw(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncilw"))
        .current_dir(dir)
        .env_remove("NCILW_OUTPUT_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn manifest(dir: &Path) -> Value {
    let text = fs::read_to_string(dir.join("manifest.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], "ncilw.manifest");
    assert_eq!(v["schema_version"], 1);
    v["data"].clone()
}

fn seeds() -> Vec<&'static str> {
    vec!["--delta", PI, "--a", "-4+3.77i", "--a", "3 + 2.67i"]
}

#[test]
fn ilw_dispersion_vanishes_at_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ncilw(
        tmp.path(),
        &["dispersion", "--kind", "ILW", "--delta", "1", "--k", "0"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn dispersion_lists_values_in_order() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ncilw(tmp.path(), &["dispersion", "--kind", "BO", "--k", "-1,0,2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        stdout(&o).split_whitespace().collect::<Vec<_>>(),
        ["-1", "0", "4"]
    );
}

#[test]
fn exact_writes_one_file_per_time_and_a_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["exact"];
    args.extend(seeds());
    args.extend(["--t", "0,2.25,4.5,6.75,9", "--out", "run"]);
    let o = ncilw(tmp.path(), &args);
    assert!(o.status.success(), "{}", stderr(&o));
    let dir = tmp.path().join("run");
    let m = manifest(&dir);
    assert_eq!(m["status"], "passed");
    assert_eq!(m["command"], "exact");
    assert_eq!(m["config"]["a"][1], "3+2.67i");
    assert_eq!(m["config"]["times"].as_array().unwrap().len(), 5);
    let files = m["files"].as_array().unwrap();
    for n in 1..=5 {
        let name = format!("exact_t{n}.csv");
        assert!(files.iter().any(|f| f["path"] == name.as_str()), "{name}");
    }
    for f in files {
        assert!(dir.join(f["path"].as_str().unwrap()).is_file());
        assert!(!f["schema"].as_str().unwrap().is_empty());
    }
    let csv = fs::read_to_string(dir.join("exact_t1.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,u,v"));
    assert_eq!(lines.count(), 1024);
}

#[test]
fn reruns_overwrite_identically() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["poles"];
    args.extend(seeds());
    args.extend(["--t", "0,1,2", "--out", "run"]);
    let snapshot = |dir: &Path| {
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.file_name().unwrap() != "manifest.json")
            .map(|p| (p.display().to_string(), fs::read(&p).unwrap()))
            .collect();
        files.sort();
        files
    };
    assert!(ncilw(tmp.path(), &args).status.success());
    let first = snapshot(&tmp.path().join("run"));
    assert!(ncilw(tmp.path(), &args).status.success());
    assert_eq!(snapshot(&tmp.path().join("run")), first);
    assert!(first.len() >= 3);
}

#[test]
fn flags_override_the_config_file_and_configs_echo_back() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"mode": "exact", "delta": 2, "a": ["1+2.5i"], "times": [0, 1],
            "tolerances": {"reality": 1e-10}}"#,
    )
    .unwrap();
    let o = ncilw(
        tmp.path(),
        &[
            "exact",
            "-c",
            "cfg.json",
            "--delta",
            "3",
            "--tol",
            "swap=0.5",
            "--print-config",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let printed = stdout(&o);
    let v: Value = serde_json::from_str(&printed).unwrap();
    assert_eq!(v["delta"], 3.0);
    assert_eq!(v["a"][0], "1+2.5i");
    assert_eq!(v["tolerances"]["reality"], 1e-10);
    assert_eq!(v["tolerances"]["swap"], 0.5);
    assert_eq!(v["output_dir"], "ncilw-out");

    fs::write(tmp.path().join("echo.json"), &printed).unwrap();
    let again = ncilw(tmp.path(), &["run", "-c", "echo.json", "--print-config"]);
    assert!(again.status.success(), "{}", stderr(&again));
    assert_eq!(stdout(&again), printed);
}

#[test]
fn run_dispatches_on_the_config_mode() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("cfg.json"),
        r#"{"mode": "dispersion", "dispersion": "KdV", "delta": 3, "k": [1]}"#,
    )
    .unwrap();
    let o = ncilw(tmp.path(), &["run", "-c", "cfg.json", "--out", "d"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "1");
    assert_eq!(manifest(&tmp.path().join("d"))["command"], "dispersion");
}

#[test]
fn config_errors_name_line_and_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        (
            "{\n  \"delta\": 1,\n  \"pionts\": 64\n}",
            vec!["pionts", "line 3"],
        ),
        (r#"{"delta": 0}"#, vec!["`delta`"]),
        (r#"{"points": 1000}"#, vec!["`points`", "power of two"]),
        (r#"{"delta": 1, "a": ["0+1.7i"]}"#, vec!["`a[0]`", "window"]),
        (r#"{"a": ["1+2j"]}"#, vec!["1+2j"]),
    ];
    for (text, needles) in cases {
        fs::write(tmp.path().join("bad.json"), text).unwrap();
        let o = ncilw(tmp.path(), &["exact", "-c", "bad.json"]);
        assert_eq!(o.status.code(), Some(2), "{text}");
        let err = stderr(&o);
        for n in needles {
            assert!(err.contains(n), "{text}: {err}");
        }
    }
    let o = ncilw(tmp.path(), &["exact", "--a", "1+5i", "--delta", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("a[0]"));
}

#[test]
fn runtime_errors_carry_the_module_and_reach_the_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ncilw(
        tmp.path(),
        &["simulate", "--initial", "missing.json", "--out", "r"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("soliton: reading initial fields"),
        "{}",
        stderr(&o)
    );
    let m = manifest(&tmp.path().join("r"));
    assert_eq!(m["status"], "error");
    assert!(m["error"].as_str().unwrap().contains("missing.json"));
}

#[test]
fn failed_verdicts_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["conserve"];
    args.extend(seeds());
    args.extend([
        "--t",
        "0,1",
        "--tol",
        "conservation_drift=1e-30",
        "--out",
        "c",
    ]);
    let o = ncilw(tmp.path(), &args);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let m = manifest(&tmp.path().join("c"));
    assert_eq!(m["status"], "failed");
    assert!(!m["failures"].as_array().unwrap().is_empty());
}

#[test]
fn output_directory_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |extra: &[&str], env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_ncilw"));
        c.current_dir(tmp.path()).env_remove("NCILW_OUTPUT_DIR");
        if let Some(e) = env {
            c.env("NCILW_OUTPUT_DIR", e);
        }
        c.args(["dispersion", "--k", "1"]).args(extra);
        assert!(c.output().unwrap().status.success());
    };
    run(&[], None);
    assert!(tmp.path().join("ncilw-out/dispersion.csv").is_file());
    run(&[], Some("from-env"));
    assert!(tmp.path().join("from-env/dispersion.csv").is_file());
    run(&["--out", "from-flag"], Some("from-env-2"));
    assert!(tmp.path().join("from-flag/dispersion.csv").is_file());
    assert!(!tmp.path().join("from-env-2").exists());
}

#[test]
fn poles_integrate_to_both_sides_of_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["poles"];
    args.extend(seeds());
    args.extend(["--t", "-5,0,5", "--out", "p"]);
    let o = ncilw(tmp.path(), &args);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(tmp.path().join("p/poles.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[1].starts_with("-5e0,"));
    assert!(rows[2].starts_with("0e0,-4e0,3.77e0,"));
}

#[test]
fn simulate_then_continue_from_its_final_field() {
    let tmp = tempfile::tempdir().unwrap();
    let common = [
        "--delta", "1", "--period", "20", "--points", "512", "--dt", "2.5e-4",
    ];
    let mut args = vec!["simulate", "--a", "-2+1.1i", "--t-end", "0.1", "--out", "a"];
    args.extend(common);
    let o = ncilw(tmp.path(), &args);
    assert!(o.status.success(), "{}", stderr(&o));
    let mut args = vec![
        "simulate",
        "--initial",
        "a/simulate_final.json",
        "--t-end",
        "0.1",
    ];
    args.extend(["--out", "b"]);
    args.extend(common);
    let o = ncilw(tmp.path(), &args);
    assert!(o.status.success(), "{}", stderr(&o));
    let diag = fs::read_to_string(tmp.path().join("b/simulate_diagnostics.csv")).unwrap();
    let t_last: f64 = diag
        .lines()
        .last()
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((t_last - 0.2).abs() < 1e-12);
}

#[test]
fn compare_reports_small_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let mut args = vec!["compare"];
    args.extend(seeds());
    args.extend(["--t", "0,0.25,0.5", "--points", "2048", "--out", "c"]);
    let o = ncilw(tmp.path(), &args);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let dir = tmp.path().join("c");
    for f in ["compare_t3.csv", "compare_poles.csv", "compare_report.json"] {
        assert!(dir.join(f).is_file(), "{f}");
    }
    let mut args = vec!["compare"];
    args.extend(seeds());
    args.extend(["--t", "0,1,3", "--out", "c2"]);
    let o = ncilw(tmp.path(), &args);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("equally spaced"));
}

#[test]
fn selftest_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = ncilw(tmp.path(), &["selftest", "--out", "s"]);
    assert!(o.status.success(), "{}{}", stdout(&o), stderr(&o));
    let out = stdout(&o);
    for name in ["identities", "operators", "periodic_one"] {
        assert!(out.contains(&format!("[PASS] {name}")), "{out}");
        assert!(tmp.path().join(format!("s/{name}_report.json")).is_file());
    }
}

#[test]
fn sweep_runs_each_member_in_its_own_directory() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("sweep.json"),
        r#"{"mode": "conserve", "delta": 1, "a": ["0+1.2i"], "times": [0, 0.5],
            "length": 40, "points": 2048,
            "sweep": [{"delta": 1.5, "a": ["0+1.6i"]},
                      {"a": ["1+0.9i", "-3+1.1i"]},
                      {"tolerances": {"conservation_drift": 1e-30}}]}"#,
    )
    .unwrap();
    let o = ncilw(
        tmp.path(),
        &["sweep", "-c", "sweep.json", "--out", "sw", "--jobs", "2"],
    );
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let out = stdout(&o);
    assert_eq!(out.matches("[PASS]").count(), 2, "{out}");
    assert_eq!(out.matches("[FAIL]").count(), 1, "{out}");
    let m0 = manifest(&tmp.path().join("sw/member_000"));
    assert_eq!(m0["config"]["delta"], 1.5);
    let m1 = manifest(&tmp.path().join("sw/member_001"));
    assert_eq!(m1["config"]["a"].as_array().unwrap().len(), 2);
    assert_eq!(
        manifest(&tmp.path().join("sw/member_002"))["status"],
        "failed"
    );

    fs::write(
        tmp.path().join("bad.json"),
        r#"{"mode": "conserve", "sweep": [{"delta": -1}]}"#,
    )
    .unwrap();
    let o = ncilw(tmp.path(), &["sweep", "-c", "bad.json", "--out", "sw2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sweep member 0"), "{}", stderr(&o));
}
