use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn decongest(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_decongest")).args(args).output().expect("spawn");
    out
}

fn ok(args: &[&str]) -> String {
    let out = decongest(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_run_export_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let scen = dir.path().join("scen.json");
    let text = ok(&["generate", "--preset", "tiny-binned", "--seed", "3", "--out", s(&scen)]);
    assert!(text.contains("zero-delay overload"));

    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, threads) in [(&a, "1"), (&b, "2")] {
        ok(&[
            "run", "--scenario", s(&scen), "--kappa", "0,0.5,1", "--centralized", "--fcfs", "--trials", "2",
            "--threads", threads, "--out", s(out),
        ]);
    }
    let metrics = fs::read_to_string(a.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("trial,method,kappa,"));
    assert_eq!(metrics.lines().count(), 1 + 2 * 5);
    assert_eq!(metrics, fs::read_to_string(b.join("metrics.csv")).unwrap());
    assert!(a.join("traces").join("trial0_dynamics_k0.5.json").exists());

    let norm = dir.path().join("norm.csv");
    ok(&["export", "--run", s(&a), "--out", s(&norm)]);
    assert!(fs::read_to_string(&norm).unwrap().lines().count() > 1);

    let table = dir.path().join("flights.csv");
    ok(&["export", "--scenario", s(&scen), "--out", s(&table)]);
    let back = dir.path().join("back.json");
    ok(&["generate", "--from-csv", s(&table), "--airspace", s(&scen), "--out", s(&back)]);
    assert_eq!(fs::read_to_string(&back).unwrap(), fs::read_to_string(&scen).unwrap());
}

#[test]
fn verify_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("verify.json");
    let text = ok(&["verify", "--instances", "5", "--json", s(&json)]);
    assert!(text.contains("kappa=0 claim"));
    let body: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert!(body["reports"].as_array().is_some_and(|r| !r.is_empty()));
    assert!(body["kappa_zero"]["verdict"].is_string());
}

#[test]
fn bench_prints_a_slope() {
    let text = ok(&["bench", "--sizes", "10,40", "--trials", "2", "--generations", "5"]);
    assert!(text.contains("slope"), "{text}");
}

#[test]
fn bad_input_is_reported() {
    let out = decongest(&["generate", "--preset", "atlantis", "--out", "/dev/null"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("atlantis"));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"sectors": [], "flights": [], "horizon": "soon"}"#).unwrap();
    let out = decongest(&["run", "--scenario", s(&bad), "--kappa", "1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("horizon"));
}
