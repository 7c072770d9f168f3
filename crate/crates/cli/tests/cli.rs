use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn nnradii(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nnradii"))
        .args(args)
        .env_remove("NNRADII_OUT_ROOT")
        .env_remove("NNRADII_WORKERS")
        .output()
        .expect("binary runs")
}

fn csv_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn generate_writes_sequence_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g");
    let o = nnradii(&["generate", "--family", "lss", "--strength", "weak", "--n", "50", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(out.join("sequence.csv")).unwrap();
    assert!(text.starts_with("t,x1\n0,"));
    assert_eq!(text.lines().count(), 51);
    assert!(!text.contains('\r'));
    let manifest = fs::read_to_string(out.join("manifest.txt")).unwrap();
    assert!(manifest.contains("command = generate"));
    assert!(manifest.contains("sequence.csv = "));
    assert!(out.join("config.resolved").exists() && out.join("seeds.csv").exists());
}

#[test]
fn reruns_are_byte_identical_and_resolved_config_reproduces() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec!["tailcheck", "--reps", "200", "--seed", "11", "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        let o = nnradii(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        out
    };
    let a = run("a", &[]);
    let b = run("b", &[]);
    assert_eq!(csv_files(&a), csv_files(&b));
    let resolved = a.join("config.resolved");
    let c = dir.path().join("c");
    let o = nnradii(&["tailcheck", "--config", resolved.to_str().unwrap(), "--out", c.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(csv_files(&a), csv_files(&c));
    let hash = |p: &Path| {
        fs::read_to_string(p.join("manifest.txt"))
            .unwrap()
            .lines()
            .find(|l| l.starts_with("manifest_hash"))
            .unwrap()
            .to_string()
    };
    assert_eq!(hash(&a), hash(&c));
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        vec![
            "bernstein".to_string(),
            "--reps".into(),
            "2000".into(),
            "--out".into(),
            out.to_string_lossy().into_owned(),
        ]
    };
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let o = Command::new(env!("CARGO_BIN_EXE_nnradii")).args(args(&a)).env("NNRADII_WORKERS", "1").output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_nnradii")).args(args(&b)).env("NNRADII_WORKERS", "4").output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(csv_files(&a), csv_files(&b));
}

#[test]
fn out_root_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_nnradii"))
        .args(["generate", "--n", "5"])
        .env("NNRADII_OUT_ROOT", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let runs: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(runs.len(), 1);
    let run = runs[0].as_ref().unwrap().path();
    assert!(run.file_name().unwrap().to_string_lossy().starts_with("generate-"));
    assert!(run.join("sequence.csv").exists());
}

#[test]
fn usage_and_config_errors_exit_2() {
    let o = nnradii(&["tailcheck", "--bogus", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = nnradii(&["exp1", "--desk", "--full"]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, "seed = 1\n[tailcheck]\nrpes = 10\n").unwrap();
    let o = nnradii(&["tailcheck", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("x").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 3") && err.contains("did you mean `reps`"), "{err}");

    let o = nnradii(&["tailcheck", "--k", "0", "--out", dir.path().join("y").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let o = nnradii(&["forecast", "--set", "forecast.lookbak=3", "--out", dir.path().join("z").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn runtime_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.csv");
    let o = nnradii(&["radii", "--input", missing.to_str().unwrap(), "--out", dir.path().join("r").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
}

#[test]
fn forecast_on_user_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("series.csv");
    let mut text = String::from("timestamp,channel,value\n");
    for t in 0..400 {
        let v = (t as f64 * 0.3).sin();
        text.push_str(&format!("{t},a,{v}\n{t},b,{}\n", 2.0 * v + 1.0));
    }
    fs::write(&input, text).unwrap();
    let out = dir.path().join("f");
    let o = nnradii(&[
        "forecast",
        "--input",
        input.to_str().unwrap(),
        "--lookback",
        "16",
        "--horizon",
        "4",
        "--pca-dims",
        "none,8",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = fs::read_to_string(out.join("forecast_report.csv")).unwrap();
    assert!(report.starts_with("task,method,scale,hyper,mse,mae,smape,accuracy,split\n"));
    assert!(report.contains("channels=2"));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("last_value"));
}

#[test]
fn classify_synthetic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    let o = nnradii(&["classify", "--synthetic-per-class", "20", "--k-grid", "1,3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.join("classify_report.csv").exists() && out.join("classify_tuning.csv").exists());
}
