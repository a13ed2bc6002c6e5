use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn dscatter(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dscatter"))
        .current_dir(dir)
        .env_remove("DSCATTER_THREADS")
        .args(args)
        .output()
        .expect("binary runs")
}

fn manifest(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("manifest on stdout")
}

fn gen_small(dir: &Path) {
    let out = dscatter(dir, &["gen", "--n", "32", "--L", "4", "--amp", "0.25", "--out", "q.cgrd"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn gen_then_plancherel_passes() {
    let dir = TempDir::new().unwrap();
    gen_small(dir.path());
    let out = dscatter(dir.path(), &["check", "plancherel", "--q", "q.cgrd", "--kn", "16", "--kL", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let m = manifest(&out);
    assert_eq!(m["subcommand"], "check plancherel");
    assert_eq!(m["checks"][0]["passed"], true);
    assert!(m["report"]["defect"].as_f64().unwrap() < 1e-3);
    assert_eq!(m["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn failed_check_exits_five() {
    let dir = TempDir::new().unwrap();
    gen_small(dir.path());
    let args = ["check", "plancherel", "--q", "q.cgrd", "--kn", "16", "--kL", "2", "--limit", "1e-12"];
    let out = dscatter(dir.path(), &args);
    assert_eq!(out.status.code(), Some(5));
    assert_eq!(manifest(&out)["checks"][0]["passed"], false);
}

#[test]
fn matroid_e2_passes() {
    let dir = TempDir::new().unwrap();
    let out = dscatter(dir.path(), &["matroid", "--family", "E2", "--N", "2", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let m = manifest(&out);
    assert!(m["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
    assert_eq!(m["report"]["pairs"].as_array().unwrap().len(), 90);
    assert!(String::from_utf8_lossy(&out.stderr).contains("90 pairs, 0 failed"));
}

#[test]
fn matroid_order_out_of_range_is_usage() {
    let dir = TempDir::new().unwrap();
    assert_eq!(dscatter(dir.path(), &["matroid", "--family", "E1", "--N", "1"]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(dscatter(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(dscatter(dir.path(), &["gen", "--n", "48", "--out", "x.cgrd"]).status.code(), Some(2));
    assert_eq!(dscatter(dir.path(), &["--threads", "0", "gen", "--out", "x.cgrd"]).status.code(), Some(2));
    assert_eq!(dscatter(dir.path(), &["fft", "--in", "missing.cgrd", "--out", "y.cgrd"]).status.code(), Some(3));
    fs::write(dir.path().join("bad.cgrd"), b"not a grid").unwrap();
    assert_eq!(dscatter(dir.path(), &["fft", "--in", "bad.cgrd", "--out", "y.cgrd"]).status.code(), Some(3));
    assert_eq!(dscatter(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn error_is_recorded_in_manifest() {
    let dir = TempDir::new().unwrap();
    let out = dscatter(dir.path(), &["fft", "--in", "missing.cgrd", "--out", "y.cgrd"]);
    assert!(manifest(&out)["report"]["error"].as_str().unwrap().contains("missing.cgrd"));
}

#[test]
fn config_precedence() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("run.cfg"), "# small run\nn = 32\nL = 4\namp = 0.5\n").unwrap();
    let m = manifest(&dscatter(dir.path(), &["--config", "run.cfg", "gen", "--amp", "0.125", "--out", "q.cgrd"]));
    assert_eq!(m["parameters"]["n"], 32);
    assert_eq!(m["parameters"]["L"], 4.0);
    assert_eq!(m["parameters"]["amp"], 0.125);

    let env = Command::new(env!("CARGO_BIN_EXE_dscatter"))
        .current_dir(dir.path())
        .env("DSCATTER_THREADS", "3")
        .args(["--config", "run.cfg", "gen", "--out", "q.cgrd"])
        .output()
        .unwrap();
    assert_eq!(manifest(&env)["parameters"]["threads"], 3);

    fs::write(dir.path().join("bad.cfg"), "n = 32\nwidth = 4\n").unwrap();
    assert_eq!(dscatter(dir.path(), &["--config", "bad.cfg", "gen", "--out", "q.cgrd"]).status.code(), Some(2));
    assert_eq!(dscatter(dir.path(), &["--config", "none.cfg", "gen", "--out", "q.cgrd"]).status.code(), Some(3));
}

#[test]
fn scatter_output_independent_of_threads() {
    let dir = TempDir::new().unwrap();
    gen_small(dir.path());
    for (threads, out) in [("1", "r1.cgrd"), ("3", "r3.cgrd")] {
        let args = ["--threads", threads, "scatter", "--q", "q.cgrd", "--kn", "16", "--kL", "2", "--out", out];
        let run = dscatter(dir.path(), &args);
        assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
        assert_eq!(manifest(&run)["report"]["failed_points"], 0);
    }
    let a = fs::read(dir.path().join("r1.cgrd")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("r3.cgrd")).unwrap());
}

#[test]
fn fft_roundtrip_and_csv() {
    let dir = TempDir::new().unwrap();
    gen_small(dir.path());
    assert!(dscatter(dir.path(), &["fft", "--in", "q.cgrd", "--out", "f.cgrd", "--csv", "f.csv"]).status.success());
    let back = manifest(&dscatter(dir.path(), &["fft", "--inverse", "--in", "f.cgrd", "--out", "b.cgrd"]));
    let orig = manifest(&dscatter(dir.path(), &["norms", "--in", "q.cgrd"]));
    let rt = manifest(&dscatter(dir.path(), &["norms", "--in", "b.cgrd"]));
    let (x, y) = (orig["report"]["l2_norm"].as_f64().unwrap(), rt["report"]["l2_norm"].as_f64().unwrap());
    assert!((x - y).abs() < 1e-12 * x, "{x} vs {y}");
    assert_eq!(back["report"]["n"], 32);
    let csv = fs::read_to_string(dir.path().join("f.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#') && !l.starts_with("x")).count(), 32 * 32);
}

#[test]
fn expand_writes_terms() {
    let dir = TempDir::new().unwrap();
    gen_small(dir.path());
    let out = dscatter(dir.path(), &["expand", "--q", "q.cgrd", "--N", "2", "--out-prefix", "t", "--kn", "16", "--kL", "2"]);
    assert_eq!(out.status.code(), Some(0));
    for f in ["t0.cgrd", "t1.cgrd", "tremainder.cgrd"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert!(manifest(&out)["report"]["identity_defect"].as_f64().unwrap() < 1e-9);
}
