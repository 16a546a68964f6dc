use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sectobs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sectobs")).args(args).env_remove("SECTOBS_CACHE").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(sectobs(&["--help"]).status.code(), Some(0));
    assert_eq!(sectobs(&["--version"]).status.code(), Some(0));
    assert_eq!(sectobs(&[]).status.code(), Some(1));
    assert_eq!(sectobs(&["analyze"]).status.code(), Some(1));
    assert_eq!(sectobs(&["analyze", "--family", "7,-11", "--coeffs", "1,0,0,0,0,0,1"]).status.code(), Some(1));
}

#[test]
fn analyze_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let o = sectobs(&["analyze", "--family", "7,-11", "--out", path(&cert)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("certified"));

    let o = sectobs(&["verify", path(&cert)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verified: certified"));
    assert!(!stdout(&o).contains("FAIL"));

    let text = fs::read_to_string(&cert).unwrap();
    let forged = dir.path().join("forged.json");
    fs::write(&forged, text.replacen("\"status\": \"certified\"", "\"status\": \"failed-rank\"", 1)).unwrap();
    let o = sectobs(&["verify", path(&forged)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL verdicts"));

    let bumped = dir.path().join("bumped.json");
    fs::write(&bumped, text.replacen("\"schema_version\": 1", "\"schema_version\": 2", 1)).unwrap();
    let o = sectobs(&["verify", path(&bumped)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unsupported version"), "{}", stderr(&o));

    let o = sectobs(&["verify", path(&dir.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn analyze_to_stdout() {
    let o = sectobs(&["analyze", "--coeffs", "1,0,0,0,0,0,1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdicts"]["status"], "failed-lemma");
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn bad_curves_exit_with_one() {
    // a = p gives a repeated factor
    let o = sectobs(&["analyze", "--family", "7,7"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error:"));
    assert_eq!(sectobs(&["analyze", "--family", "9,1"]).status.code(), Some(1));
    assert_eq!(sectobs(&["analyze", "--coeffs", "1,0,0"]).status.code(), Some(1));
    assert_eq!(sectobs(&["analyze", "--family", "7,-11", "--height-bound", "0"]).status.code(), Some(1));
    assert_eq!(sectobs(&["search", "--pmax", "5", "--amin", "0", "--amax", "1"]).status.code(), Some(1));
}

#[test]
fn search_writes_rows_and_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = sectobs(&["search", "--pmax", "7", "--amin", "-12", "--amax", "-10", "--jobs", "2", "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("certified: [(7, -11)]"));
    let rows: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("rows.json")).unwrap()).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 3);
    for row in rows.as_array().unwrap() {
        let file = out.join(row["certificate"].as_str().unwrap());
        let o = sectobs(&["verify", path(&file)]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        let cert: serde_json::Value = serde_json::from_str(&fs::read_to_string(&file).unwrap()).unwrap();
        assert_eq!(cert["verdicts"]["status"], row["status"]);
    }
}

#[test]
fn cache_variable_overrides_flag() {
    let dir = tempfile::tempdir().unwrap();
    let (env_dir, flag_dir) = (dir.path().join("env"), dir.path().join("flag"));
    let o = Command::new(env!("CARGO_BIN_EXE_sectobs"))
        .args(["search", "--pmax", "7", "--amin", "-11", "--amax", "-11", "--cache", path(&flag_dir)])
        .env("SECTOBS_CACHE", &env_dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_dir(&env_dir).unwrap().count(), 1);
    assert!(!flag_dir.exists());
}
