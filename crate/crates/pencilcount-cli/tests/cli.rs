use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pencilcount")).current_dir(dir).args(args).env_remove("PENCILCOUNT_JOBS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn single_values() {
    let dir = tempfile::tempdir().unwrap();
    for (args, want) in [
        (&["w3", "--d", "5", "--l", "2"][..], "17\n"),
        (&["gw3", "--d", "2"][..], "0\n"),
        (&["gw3", "--d", "5"][..], "105\n"),
        (&["w-quadric", "--a", "2", "--b", "3", "--l", "3"][..], "12\n"),
        (&["gw-quadric", "--a", "2", "--b", "3"][..], "96\n"),
        (&["w3", "--d", "4", "--l", "1"][..], "0\n"),
        (&["w3", "--d", "4", "--l", "1", "--force-compute"][..], "-2\n"),
    ] {
        let o = run(dir.path(), args);
        assert!(o.status.success(), "{:?}: {}", args, stderr(&o));
        assert_eq!(stdout(&o), want, "{:?}", args);
    }
}

#[test]
fn cache_file_is_written_and_reused() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["w3", "--d", "7", "--l", "3"]);
    assert_eq!(stdout(&o), "-1269\n");
    let text = std::fs::read_to_string(dir.path().join("pencilcount-cache.jsonl")).unwrap();
    assert!(text.lines().all(|l| l.starts_with("{\"kind\":")));
    assert!(text.contains("\"value\":\"-1269\""));
    let o = run(dir.path(), &["w3", "--d", "7", "--l", "3"]);
    assert_eq!(stdout(&o), "-1269\n");
    let again = std::fs::read_to_string(dir.path().join("pencilcount-cache.jsonl")).unwrap();
    assert_eq!(text, again);

    let other = tempfile::tempdir().unwrap();
    let o = run(other.path(), &["w3", "--d", "3", "--l", "0", "--no-cache"]);
    assert!(o.status.success());
    assert!(!other.path().join("pencilcount-cache.jsonl").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["w3", "--d", "5", "--l", "5", "--no-cache"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("ERROR 2:"));
    assert!(stderr(&o).contains("fixture"));
    let o = run(dir.path(), &["w3", "--d", "5", "--l", "7", "--no-cache"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(dir.path(), &["gw3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("ERROR 2:"));
    let o = run(dir.path(), &["gw3", "--d", "3", "--jobs", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(dir.path(), &["w3", "--d", "3", "--l", "0", "--convention", "nope", "--no-cache"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(dir.path(), &["gw-quadric", "--a", "4", "--b", "5", "--max-states", "3", "--no-cache"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).starts_with("ERROR 3:"));
    let o = run(dir.path(), &["verify", "--suite", "bogus", "--no-cache"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn table_formats() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["table", "--dmax", "5", "--format", "csv", "--no-cache"]);
    assert_eq!(stdout(&o), "d,l,value\n1,0,1\n3,0,-1\n3,1,-1\n3,2,-1\n5,0,45\n5,1,29\n5,2,17\n5,3,9\n5,4,5\n");
    let o = run(dir.path(), &["table", "--dmax", "9", "--no-cache"]);
    let text = stdout(&o);
    assert!(text.ends_with("9: 17756793 6717465 2407365 812157 256065 75281 21165 6165 1993\n"), "{}", text);
    let o = run(dir.path(), &["table", "--dmax", "3", "--format", "json", "--no-cache", "--jobs", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[1], serde_json::json!({"d": 3, "l": 0, "value": "-1"}));
}

#[test]
fn jobs_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_pencilcount"))
        .current_dir(dir.path())
        .args(["gw3", "--d", "5", "--no-cache"])
        .env("PENCILCOUNT_JOBS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_pencilcount"))
        .current_dir(dir.path())
        .args(["gw3", "--d", "5", "--no-cache"])
        .env("PENCILCOUNT_JOBS", "1")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "105\n");
}

#[test]
fn diagram_dump() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["diagrams", "--a", "2", "--b", "3", "--dump", "json", "--no-cache"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ds = v.as_array().unwrap();
    assert_eq!(ds.len(), 8);
    let keys: Vec<&str> = ds[0].as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(&keys[..6], ["floors", "elevators", "bottom", "top", "aut", "mu_complex"]);
    for s in 0..=4 {
        let total: i64 = ds.iter().map(|d| d[format!("contrib_s{}", s)].as_str().unwrap().parse::<i64>().unwrap()).sum();
        assert_eq!(total, [48, 32, 20, 12, 8][s]);
    }
}

#[test]
fn verify_oracle_suite_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "--suite", "paper", "--format", "json", "--no-cache"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    let rec = &v["records"][0];
    for k in ["check", "params", "expected", "actual", "pass"] {
        assert!(rec.get(k).is_some(), "{}", k);
    }
    assert_eq!(v["records"].as_array().unwrap().len(), 25);
}

#[test]
fn properties_suite_reports_the_known_failures() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["verify", "--suite", "properties", "--no-cache"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    let fails: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(fails.len(), 6, "{}", fails.join("\n"));
    assert!(fails.iter().all(|l| l.contains("even_vanishing_forced {\"d\":4") || l.contains("congruence_quadric {\"a\":2,\"b\":2")));
}

#[test]
fn state_report_samples_large_bidegrees() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["state-report", "--a", "8", "--b", "9", "--no-cache", "--max-raw", "20000", "--per-shape", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["exact"], false);
    assert_eq!(v["tree_shapes"], 286);
    assert_eq!(v["states_per_position"].as_array().unwrap().len(), 33);
    let o = run(dir.path(), &["state-report", "--a", "2", "--b", "3", "--no-cache"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["exact"], true);
    assert_eq!(v["diagrams_scanned"], 8);
}
