use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn qlsi() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qlsi"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run_to(config: &Path, prefix: &Path, threads: Option<&str>) -> Output {
    let mut cmd = qlsi();
    cmd.arg("run").arg(config).arg("--output").arg(prefix);
    if let Some(n) = threads {
        cmd.env("QLSI_THREADS", n);
    }
    cmd.output().unwrap()
}

fn plot_rows(csv: &Path) -> Vec<String> {
    let out = qlsi().arg("plot").arg(csv).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap().lines().skip(1).map(str::to_owned).collect()
}

fn series_count(rows: &[String]) -> usize {
    let mut names: Vec<&str> = rows.iter().map(|r| r.splitn(3, ',').nth(2).unwrap()).collect();
    names.sort();
    names.dedup();
    names.len()
}

#[test]
fn reports_are_reproducible_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    for name in ["lsi_estimate", "qht_rotated", "sv"] {
        let config = configs().join(format!("{name}.toml"));
        let mut outputs = Vec::new();
        for (tag, threads) in [("a", None), ("b", None), ("c", Some("1"))] {
            let prefix = dir.path().join(format!("{name}_{tag}"));
            let out = run_to(&config, &prefix, threads);
            assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
            outputs.push(std::fs::read(prefix.with_extension("csv")).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{name}: repeated run differs");
        assert_eq!(outputs[0], outputs[2], "{name}: single-threaded run differs");
    }
}

#[test]
fn shipped_configs_pass() {
    let dir = TempDir::new().unwrap();
    let mut entries: Vec<_> = std::fs::read_dir(configs()).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for config in entries.iter().filter(|p| p.extension().is_some_and(|e| e == "toml")) {
        let prefix = dir.path().join(config.file_stem().unwrap());
        let out = run_to(config, &prefix, None);
        assert_eq!(out.status.code(), Some(0), "{}: {}", config.display(), String::from_utf8_lossy(&out.stderr));
        let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(summary["pass"], true);
        assert!(prefix.with_extension("json").exists());
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let verify = |beta: f64| {
        format!("suite = \"lsi-verify\"\nseed = 1\np_grid = [2.0]\nbeta = {beta:?}\nsamples = 100\n\n[generator]\nsigma = [0.25, 0.75]\n")
    };
    let ok = write(&dir, "ok.toml", &verify(0.0));
    assert_eq!(qlsi().arg("run").arg(&ok).output().unwrap().status.code(), Some(0));

    // The optimal constant here is about 0.455.
    let too_large = write(&dir, "too_large.toml", &verify(0.6));
    let out = qlsi().arg("run").arg(&too_large).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let summary: serde_json::Value = serde_json::from_slice(out.stderr.trim_ascii()).unwrap();
    assert_eq!(summary["pass"], false);

    let malformed = write(&dir, "malformed.toml", "suite = \"hc\"\nseed = [\n");
    let unknown = write(&dir, "unknown.toml", "suite = \"nope\"\nseed = 1\n");
    for config in [&malformed, &unknown, &dir.path().join("missing.toml")] {
        let out = qlsi().arg("run").arg(config).output().unwrap();
        assert_eq!(out.status.code(), Some(1), "{}", config.display());
        let err: serde_json::Value = serde_json::from_slice(out.stderr.trim_ascii()).unwrap();
        assert!(err["error"].is_string() && err["message"].is_string());
    }

    assert_eq!(qlsi().arg("run").output().unwrap().status.code(), Some(1));
    assert_eq!(qlsi().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn plot_row_counts() {
    let dir = TempDir::new().unwrap();

    let prefix = dir.path().join("qht");
    assert!(run_to(&configs().join("qht_commuting.toml"), &prefix, None).status.success());
    let rows = plot_rows(&prefix.with_extension("csv"));
    assert_eq!(rows.len(), 10);
    assert_eq!(series_count(&rows), 2);

    let hc = |p: &str, q: &str| {
        format!("suite = \"hc\"\nseed = 3\np_grid = {p}\nq_grid = {q}\nt_factors = [1.0]\nsamples = 20\n\n[generator]\nsigma = [0.25, 0.75]\n")
    };
    let grid = write(&dir, "grid.toml", &hc("[3.0, 4.0, 5.0, 6.0]", "[1.25, 1.5, 2.0, 2.5]"));
    let prefix = dir.path().join("grid");
    assert!(run_to(&grid, &prefix, None).status.success());
    let rows = plot_rows(&prefix.with_extension("csv"));
    assert_eq!(rows.len(), 16);
    assert_eq!(series_count(&rows), 16);

    let single = write(&dir, "single.toml", &hc("[2.0]", "[1.5]"));
    let prefix = dir.path().join("single");
    assert!(run_to(&single, &prefix, None).status.success());
    assert_eq!(plot_rows(&prefix.with_extension("csv")).len(), 1);

    let header = std::fs::read_to_string(prefix.with_extension("csv")).unwrap();
    let empty = write(&dir, "empty.csv", header.lines().next().unwrap());
    assert_eq!(qlsi().arg("plot").arg(&empty).output().unwrap().status.code(), Some(1));
}

#[test]
fn one_shot_commands() {
    let dir = TempDir::new().unwrap();
    let sigma = write(&dir, "sigma.json", r#"{"dim": 2, "re": [[0.25, 0.0], [0.0, 0.75]]}"#);
    let x = write(&dir, "x.json", r#"{"dim": 2, "re": [[2.0, 0.0], [0.0, 1.0]]}"#);
    let out = qlsi().args(["norms", "--p", "2"]).arg("--sigma").arg(&sigma).arg("--x").arg(&x).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let want = (0.25f64 * 4.0 + 0.75).sqrt();
    assert!((v["norm"].as_f64().unwrap() - want).abs() < 1e-12);

    let inst = write(
        &dir,
        "inst.json",
        r#"{"rho": {"dim": 2, "re": [[0.5, 0.0], [0.0, 0.5]]}, "sigma": {"dim": 2, "re": [[0.25, 0.0], [0.0, 0.75]]}, "n": 1}"#,
    );
    let out = qlsi().args(["qht", "--eps", "0.1", "--n", "3"]).arg("--instance").arg(&inst).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n"], 3);
    assert!(v["beta"].as_f64().unwrap() >= v["beta_lower_bound"].as_f64().unwrap());
}
