use std::fs;
use std::path::Path;
use std::process::Command;

use sbc::cli::main_with;

fn run(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let mut full = vec!["sbc"];
    full.extend_from_slice(args);
    let code = main_with(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const MINIMAL: &str = "system.kind = two_agent\nrun.horizon = 10\nrun.n = 100\nrun.seed = 7\n";

#[test]
fn minimal_run_writes_one_row_per_time_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "min.txt", MINIMAL);
    let mut bytes = Vec::new();
    for rep in 0..2 {
        let out = dir.path().join(format!("o{rep}"));
        let (code, stdout, err) = run(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        assert!(stdout.contains("t=10"));
        let tail = fs::read(out.join("tail.csv")).unwrap();
        let text = String::from_utf8(tail.clone()).unwrap();
        assert_eq!(text.lines().count(), 12, "header plus t = 0..=10");
        assert!(out.join("path.csv").exists() && out.join("moments.csv").exists());
        bytes.push((tail, fs::read(out.join("path.csv")).unwrap()));
    }
    assert_eq!(bytes[0], bytes[1]);
}

#[test]
fn csv_is_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "w.txt",
        "system.kind = bistar\nsystem.path = y_fg\nrun.horizon = 60\nrun.times = 10,30,60\nrun.n = 5000\n",
    );
    let mut seen: Vec<Vec<u8>> = Vec::new();
    for w in ["1", "4", "16"] {
        let out = dir.path().join(format!("w{w}"));
        let (code, _, err) = run(&["run", "--config", &cfg, "--workers", w, "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        let mut all = fs::read(out.join("tail.csv")).unwrap();
        all.extend(fs::read(out.join("moments.csv")).unwrap());
        seen.push(all);
    }
    assert_eq!(seen[0], seen[1]);
    assert_eq!(seen[0], seen[2]);
}

#[test]
fn invalid_config_exits_with_two_and_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.txt", "run.horizon = 10\nrun.bogus = 3\n");
    let (code, _, err) = run(&["tail", "--config", &cfg]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
    let cfg = write_config(dir.path(), "bad2.txt", "influence.G.alpha = -1\n");
    assert_eq!(run(&["tail", "--config", &cfg]).0, 2);
    assert_eq!(run(&["tail", "--config", "/nonexistent/config.txt"]).0, 2);
    assert_eq!(run(&["bound", "--theorem", "no_such_bound"]).0, 2);
}

#[test]
fn unwritable_output_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    let (code, _, _) = run(&["simulate", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 3);
}

#[test]
fn binary_reports_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_sbc");
    let status = Command::new(bin).arg("reproduce").arg("fig9").output().unwrap().status;
    assert_eq!(status.code(), Some(2));
    let status = Command::new(bin).arg("--help").output().unwrap().status;
    assert_eq!(status.code(), Some(0));
}

#[test]
fn constant_full_influence_audit_passes_trivially() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "g1.txt",
        "influence.G.family = constant\ninfluence.G.g0 = 1\nrun.horizon = 100\nrun.times = 10,50,100\nrun.n = 2000\n",
    );
    let out = dir.path().join("a");
    let (code, stdout, err) = run(&["audit", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("audit: all links hold"), "{stdout}");
    let statuses: Vec<&str> = stdout.lines().filter(|l| l.starts_with("t=")).filter_map(|l| l.rsplit(": ").next()).collect();
    assert_eq!(statuses.len(), 9);
    assert!(statuses.iter().all(|&s| s == "pass" || s == "trivial"), "{stdout}");
}

#[test]
fn reference_influence_audit_passes_at_large_n() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "d5.txt",
        "influence.G.alpha = 0.5\nrun.horizon = 400\nrun.times = 50,100,200,400\nrun.n = 100000\n",
    );
    let out = dir.path().join("a");
    let (code, stdout, err) = run(&["audit", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let csv = fs::read_to_string(out.join("audit.csv")).unwrap();
    let statuses: Vec<&str> = csv.lines().skip(1).map(|l| l.rsplit(',').nth(1).unwrap()).collect();
    assert_eq!(statuses.len(), 12);
    assert!(statuses.iter().all(|&s| s == "pass"), "{csv}");
    assert!(stdout.contains("loosest link"));
}

#[test]
fn unstable_influence_is_flagged_not_asserted() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "a3.txt", "influence.G.alpha = 3\nrun.horizon = 50\nrun.times = 10,50\nrun.n = 1000\n");
    let out = dir.path().join("a");
    let (code, _, err) = run(&["audit", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let csv = fs::read_to_string(out.join("audit.csv")).unwrap();
    for line in csv.lines().filter(|l| l.contains(",tail,")) {
        assert!(line.contains("influence_decay") && line.contains("inapplicable"), "{line}");
    }
}

#[test]
fn bound_prints_json_records() {
    let (code, stdout, err) = run(&["bound", "--theorem", "simplified", "--k", "5"]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let recs = v.as_array().unwrap();
    assert_eq!(recs.len(), 101);
    assert_eq!(recs[3]["theorem"], "simplified");
    assert_eq!(recs[3]["k"], 5.0);
}

#[test]
fn json_format_writes_parsable_tail() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "min.txt", MINIMAL);
    let out = dir.path().join("j");
    let (code, _, err) = run(&["tail", "--config", &cfg, "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("tail.json")).unwrap()).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 11);
}

#[test]
fn oracle_writes_exact_law() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "o.txt",
        "influence.G.alpha = 1\nnoise.kind = discrete\nnoise.points = -2,0,2\nnoise.masses = 0.25,0.5,0.25\nrun.horizon = 8\nrun.times = 4,8\n",
    );
    let out = dir.path().join("o");
    let (code, stdout, err) = run(&["oracle", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.contains("t=8"));
    let law = fs::read_to_string(out.join("oracle_distribution.csv")).unwrap();
    let total: f64 = law.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
    // uniform noise has no lattice
    assert_eq!(run(&["oracle"]).0, 2);
}

#[test]
fn path_figure_writes_three_files_with_envelope() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run(&["reproduce", "fig2a", "--n", "200", "--out", dir.path().to_str().unwrap(), "--svg"]);
    assert_eq!(code, 0, "{err}");
    for d in ["0.2", "0.5", "0.8"] {
        let text = fs::read_to_string(dir.path().join(format!("fig2a/fig2a_delta{d}.csv"))).unwrap();
        let header = text.lines().next().unwrap();
        assert!(header.split(',').any(|c| c == "envelope"), "{header}");
        assert_eq!(text.lines().count(), 1002);
        assert!(dir.path().join(format!("fig2a/fig2a_delta{d}.svg")).exists());
    }
}

#[test]
fn bistar_figures_write_follower_and_cross_tables() {
    let dir = tempfile::tempdir().unwrap();
    for fig in ["fig3a", "fig3b"] {
        let (code, stdout, err) = run(&["reproduce", fig, "--n", "2000", "--out", dir.path().to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        assert!(stdout.contains("simplified curve"));
        let text = fs::read_to_string(dir.path().join(format!("{fig}/{fig}.csv"))).unwrap();
        assert_eq!(text.lines().count(), 41);
    }
}
