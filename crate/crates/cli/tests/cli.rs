use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metrifract"))
        .current_dir(dir)
        .env_remove("METRIFRACT_OUT")
        .args(args)
        .output()
        .unwrap()
}

fn json(path: impl AsRef<Path>) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn write_line(dir: &Path) {
    let rows: String = (0..20).map(|i| format!("{}\n", i as f64 / 19.0)).collect();
    fs::write(dir.join("line.csv"), rows).unwrap();
}

#[test]
fn profile_writes_json_and_csv() {
    let tmp = tempfile::tempdir().unwrap();
    write_line(tmp.path());
    let out = run(tmp.path(), &["--out", "o", "profile", "--points", "line.csv", "--nmax", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(tmp.path().join("o/profile.json"));
    assert_eq!(report["rows"].as_array().unwrap().len(), 7);
    let csv = fs::read_to_string(tmp.path().join("o/profile.csv")).unwrap();
    assert_eq!(csv.lines().count(), 8);
}

#[test]
fn cantor_example_has_no_violations() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        tmp.path(),
        &["--out", "o", "cantor", "--epsilon", "1/2", "--G", "list:1", "--depth", "10", "--verify", "1000"],
    );
    assert_eq!(out.status.code(), Some(0));
    let report = json(tmp.path().join("o/cantor.json"));
    assert_eq!(report["modulus"]["violations"], 0);
    assert_eq!(report["modulus"]["pairs"], 1000);
    assert_eq!(report["epsilon"], "1/2");
}

#[test]
fn unknown_command_and_parse_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), &["frobnicate"]).status.code(), Some(2));
    let out = run(tmp.path(), &["cantor", "--G", "poly:x,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("poly:x,1"));
    let out = run(tmp.path(), &["cantor", "--epsilon", "pi"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(tmp.path(), &["profile", "--points", "missing.csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validation_failures_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["gauge", "--gauge", "pow:1/2", "--beta", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ord"));
    let out = run(tmp.path(), &["cantor", "--epsilon", "3/2"]);
    assert_eq!(out.status.code(), Some(1));
    fs::write(tmp.path().join("bad.csv"), "0,1\n2,0\n").unwrap();
    let out = run(tmp.path(), &["embed", "--matrix", "bad.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unchecked_hat_is_written() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &["--out", "o", "gauge", "--gauge", "pow:1/2", "--beta", "1", "--unchecked"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(tmp.path().join("o/gauge.json"));
    assert_eq!(report["hat"]["bounded"], false);
    let series = fs::read_to_string(tmp.path().join("o/hat_series.csv")).unwrap();
    // header plus one row per grid radius
    assert_eq!(series.lines().count(), 1 + report["hat"]["grid_points"].as_u64().unwrap() as usize);
}

#[test]
fn env_var_overrides_out() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_metrifract"))
        .current_dir(tmp.path())
        .env("METRIFRACT_OUT", "from_env")
        .args(["--out", "from_flag", "ifs", "--preset", "cantor", "--depth", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("from_env/ifs.json").exists());
    assert!(!tmp.path().join("from_flag").exists());
}

#[test]
fn curve_streams_csv_to_stdout() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        tmp.path(),
        &["--out", "o", "curve", "--m", "2", "--order", "2", "--samples", "5", "--pairs", "0"],
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,x1,x2");
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[1], "0,0,0");
    let report = json(tmp.path().join("o/curve.json"));
    assert_eq!(report["cells_hit"], 16);
}

#[test]
fn ifs_file_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let spec = r#"{"dim": 1, "maps": [
        {"ratio": 0.5, "perm": [1], "translate": [0]},
        {"ratio": 0.25, "perm": [-1], "translate": [1]}],
        "open_set": {"lo": [0], "hi": [1]}}"#;
    fs::write(tmp.path().join("ifs.json"), spec).unwrap();
    let out = run(tmp.path(), &["--out", "o", "ifs", "--ifs", "ifs.json", "--depth", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(tmp.path().join("o/ifs.json"));
    // 2^-s + 4^-s = 1 at 2^-s = (√5 − 1)/2
    let s = report["moran_dimension"].as_f64().unwrap();
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    assert!((s + golden.log2()).abs() < 1e-10);
    assert_eq!(report["osc"]["disjoint"], true);
    let rows = fs::read_to_string(tmp.path().join("o/attractor.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 16);
}

#[test]
fn dimension_from_points_and_extend() {
    let tmp = tempfile::tempdir().unwrap();
    write_line(tmp.path());
    let out = run(
        tmp.path(),
        &["--out", "o", "dimension", "--points", "line.csv", "--rmin", "1", "--rmax", "3"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(tmp.path().join("o/dimension.json"));
    assert!(report.get("moran_dimension").is_none());

    fs::write(tmp.path().join("anchors.csv"), "0,0,1\n19,1,0\n").unwrap();
    let out = run(
        tmp.path(),
        &["--out", "o", "extend", "--points", "line.csv", "--anchors", "anchors.csv", "--gauge", "pow:1"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("o/extend.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "f1,f2");
    assert_eq!(lines.len(), 21);
    assert_eq!(lines[1], "0,1");
}
