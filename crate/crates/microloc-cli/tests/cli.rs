use std::fs;
use std::io::BufReader;
use std::path::Path;
use std::process::{Command, Output};

use microloc::frontier::chirp_frontier;
use microloc::{Frontier, SampledPath};

fn microloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_microloc"))
        .args(args)
        .env_remove("MICROLOC_WORKERS")
        .output()
        .unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synth_is_byte_identical_across_runs_and_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.bin"), dir.path().join("b.bin"));
    let base = ["synth", "--fbm-h", "0.5", "--n", "16384", "--dt", "6.1e-5", "--seed", "7", "--out"];
    let run = |out: &Path, workers: &str| {
        let mut args = base.to_vec();
        args.extend([arg(out), "--workers", workers]);
        let o = microloc(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    };
    run(&a, "1");
    run(&b, "2");
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let p = SampledPath::read_binary(BufReader::new(fs::File::open(&a).unwrap())).unwrap();
    assert_eq!(p.len(), 16384);
    assert_eq!(p.dt(), 6.1e-5);
    let meta: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("a.bin.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 7);
}

#[test]
fn csv_output_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.csv");
    let o = microloc(&["synth", "--process", r#"{"process":"fbm","hurst":0.3}"#, "--n", "300", "--seed", "1", "--out", arg(&out)]);
    assert!(o.status.success());
    let p = SampledPath::read_csv(BufReader::new(fs::File::open(&out).unwrap())).unwrap();
    let q = microloc::synth::synth_fbm(0.3, 300, 1.0 / 300.0, 1).unwrap();
    let close = p.values().iter().zip(q.values()).all(|(a, b)| (a - b).abs() <= 1e-15 * (1.0 + b.abs()));
    assert!(close);
}

#[test]
fn chirp_frontier_csv() {
    let o = microloc(&["frontier", "--chirp", "1", "1"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let f = Frontier::read_csv(text.as_bytes()).unwrap();
    for k in 0..=10 {
        let s = -(k as f64) / 10.0;
        assert!((f.eval(s) - (0.5 * s + 0.5)).abs() < 1e-15);
    }
    assert_eq!(f, chirp_frontier(1.0, 1.0).unwrap());
}

#[test]
fn translated_frontier_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("r.json");
    let o = microloc(&["frontier", "--fbm-h", "0.5", "--translate", "0.2", "--report", arg(&rep)]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&rep).unwrap()).unwrap();
    assert!((v["pointwise"].as_f64().unwrap() - 0.3).abs() < 1e-12, "{v}");
}

#[test]
fn estimate_writes_table_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.bin");
    assert!(microloc(&["synth", "--fbm-h", "0.6", "--n", "4096", "--seed", "3", "--out", arg(&path)]).status.success());
    let o = microloc(&["estimate", "--input", arg(&path), "--t0", "0.5"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("s_prime,sigma_hat,stderr\n"));
    assert_eq!(text.lines().count(), 11);

    let o = microloc(&["estimate", "--input", arg(&path), "--t0-grid", "0.25,0.75", "--s-grid", "-0.5,0"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("t0,s_prime,sigma_hat,stderr\n"));
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let (a, b) = (dir.path().join("a.bin"), dir.path().join("b.bin"));
    fs::write(
        &cfg,
        format!(r#"{{"spec":{{"process":"fbm","hurst":0.4}},"n":512,"seed":9,"out":"{}"}}"#, arg(&a)),
    )
    .unwrap();
    assert!(microloc(&["--config", arg(&cfg), "synth"]).status.success());
    assert!(microloc(&["--config", arg(&cfg), "synth", "--seed", "10", "--out", arg(&b)]).status.success());
    let read = |p: &Path| SampledPath::read_binary(BufReader::new(fs::File::open(p).unwrap())).unwrap();
    assert_eq!(read(&a).values(), microloc::synth::synth_fbm(0.4, 512, 1.0 / 512.0, 9).unwrap().values());
    assert_eq!(read(&b).values(), microloc::synth::synth_fbm(0.4, 512, 1.0 / 512.0, 10).unwrap().values());
}

#[test]
fn fracdiff_writes_path_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let (x, y, r) = (dir.path().join("x.bin"), dir.path().join("y.csv"), dir.path().join("r.json"));
    assert!(microloc(&["synth", "--fbm-h", "0.6", "--n", "4096", "--seed", "4", "--out", arg(&x)]).status.success());
    let o = microloc(&["fracdiff", "--input", arg(&x), "--eps", "0.2", "--out", arg(&y), "--report", arg(&r)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let d = SampledPath::read_csv(BufReader::new(fs::File::open(&y).unwrap())).unwrap();
    assert_eq!(d.len(), 4096);
    let v: serde_json::Value = serde_json::from_slice(&fs::read(&r).unwrap()).unwrap();
    assert_eq!(v["eps"], 0.2);
}

#[test]
fn covlab_variance_is_exact() {
    let o = microloc(&["covlab", "variance", "--fbm-h", "0.7", "--t", "0.3", "--u", "0.7"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["exact"].as_f64().unwrap() - 0.4f64.powf(1.4)).abs() < 1e-12);
}

#[test]
fn verify_selects_suites() {
    let o = microloc(&["verify", "--suite", "frontier"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("A8  PASS"), "{text}");
    assert!(!text.contains("A1 "));
}

#[test]
fn exit_codes() {
    // usage
    assert_eq!(microloc(&["transmogrify"]).status.code(), Some(1));
    assert_eq!(microloc(&["frontier", "--chirp", "1", "1", "--power", "0.5"]).status.code(), Some(1));
    assert_eq!(microloc(&["verify", "--suite", "nope"]).status.code(), Some(1));
    // configuration: missing seed, malformed JSON
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.bin");
    assert_eq!(microloc(&["synth", "--fbm-h", "0.5", "--n", "64", "--out", arg(&out)]).status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    assert_eq!(microloc(&["--config", arg(&bad), "frontier", "--fbm-h", "0.5"]).status.code(), Some(2));
    // module: H outside (0,1), too fine a scale
    assert_eq!(microloc(&["frontier", "--fbm-h", "1.5"]).status.code(), Some(3));
    assert!(microloc(&["synth", "--fbm-h", "0.5", "--n", "1024", "--seed", "1", "--out", arg(&out)]).status.success());
    assert_eq!(microloc(&["estimate", "--input", arg(&out), "--n-max", "12"]).status.code(), Some(3));
}
