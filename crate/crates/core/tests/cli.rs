use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fabris"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn small_config(dir: &Path, t_count: usize) -> PathBuf {
    let text = fs::read_to_string(config("reference.toml"))
        .unwrap()
        .replace("nx = 10", "nx = 4")
        .replace("ny = 10", "ny = 3")
        .replace("t_count = 20", &format!("t_count = {t_count}"));
    let path = dir.join(format!("small_{t_count}.toml"));
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn steer_single_element() {
    let o = run(&["steer", config("single_element.toml").to_str().unwrap(), "--theta-deg", "37", "--phi-deg", "-12"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "0,1.0,0.0\n");
}

#[test]
fn steer_broadside_is_all_ones() {
    let o = run(&["steer", config("reference.toml").to_str().unwrap(), "--theta-deg", "90", "--phi-deg", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines.len(), 100);
    for (n, line) in lines.iter().enumerate() {
        assert_eq!(line, &format!("{n},1.0,0.0"));
    }
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "[geometry\nnx = ").unwrap();
    let o = run(&["steer", path.to_str().unwrap(), "--theta-deg", "0", "--phi-deg", "0"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["steer", "/nonexistent/config.toml", "--theta-deg", "0", "--phi-deg", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_field_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(config("reference.toml")).unwrap().replace("tx_power_dbm = 24.0\n", "");
    let path = dir.path().join("c.toml");
    fs::write(&path, text).unwrap();
    let o = run(&["optimize", path.to_str().unwrap(), "--out", dir.path().join("o.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("tx_power_dbm"), "{}", stderr(&o));
}

#[test]
fn degenerate_geometry_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(config("reference.toml"))
        .unwrap()
        .replace("p_ue = [10.0, 0.0, -10.0]", "p_ue = [10.0, 20.0, 0.0]");
    let path = dir.path().join("c.toml");
    fs::write(&path, text).unwrap();
    let o = run(&["optimize", path.to_str().unwrap(), "--out", dir.path().join("o.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn optimize_without_leakage_keeps_everything_on() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 0);
    let out = dir.path().join("o.csv");
    let o = run(&["optimize", cfg.to_str().unwrap(), "--seed", "4", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,phase_rad,active"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.ends_with(",1")));
    assert!(stdout(&o).contains("fabris_slnr_db"));
    assert!(stdout(&o).contains("naive_slnr_db"));
}

#[test]
fn optimize_methods_and_brute_limit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 3);
    let out = dir.path().join("b.csv");
    let o = run(&["optimize", cfg.to_str().unwrap(), "--method", "brute", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("brute_slnr_db"));
    let o = run(&["optimize", config("reference.toml").to_str().unwrap(), "--method", "brute", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn montecarlo_single_trial() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 4);
    let out = dir.path().join("mc");
    let o = run(&["montecarlo", cfg.to_str().unwrap(), "--trials", "1", "--seed", "9", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let cdf = fs::read_to_string(out.join("cdf.csv")).unwrap();
    let rows: Vec<&str> = cdf.lines().collect();
    assert_eq!(rows[0], "method,slnr_db,prob");
    assert_eq!(rows.len(), 3);
    assert!(rows[1].starts_with("fabris,") && rows[1].ends_with(",1.0"));
    assert!(rows[2].starts_with("naive,") && rows[2].ends_with(",1.0"));
    let trials = fs::read_to_string(out.join("trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 3);
    let summary = fs::read_to_string(out.join("summary.txt")).unwrap();
    assert!(summary.contains("[fabris]") && summary.contains("median_db"));
}

#[test]
fn montecarlo_seed_changes_values_not_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 4);
    let mut files = Vec::new();
    for seed in ["1", "2"] {
        let out = dir.path().join(format!("mc{seed}"));
        let o = run(&["montecarlo", cfg.to_str().unwrap(), "--trials", "5", "--seed", seed, "--out-dir", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        files.push(fs::read_to_string(out.join("trials.csv")).unwrap());
    }
    assert_ne!(files[0], files[1]);
    let shape = |s: &str| s.lines().map(|l| l.split(',').take(2).collect::<Vec<_>>().join(",")).collect::<Vec<_>>();
    assert_eq!(shape(&files[0]), shape(&files[1]));
}

#[test]
fn beampattern_boresight_and_degenerate() {
    let o = run(&["beampattern", config("boresight_10x10.toml").to_str().unwrap(), "--grid-step-deg", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("main_lobe_db = 40.0\n"), "{}", stdout(&o));

    let dir = tempfile::tempdir().unwrap();
    let off = dir.path().join("off.txt");
    fs::write(&off, "0\n".repeat(100)).unwrap();
    let o = run(&["beampattern", config("boresight_10x10.toml").to_str().unwrap(), "--activation-file", off.to_str().unwrap(), "--grid-step-deg", "2"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("degenerate pattern"));

    let short = dir.path().join("short.txt");
    fs::write(&short, "1\n".repeat(99)).unwrap();
    let o = run(&["beampattern", config("boresight_10x10.toml").to_str().unwrap(), "--activation-file", short.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn beampattern_reads_optimize_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 3);
    let prof = dir.path().join("p.csv");
    let o = run(&["optimize", cfg.to_str().unwrap(), "--out", prof.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let pat = dir.path().join("pattern.csv");
    let p = prof.to_str().unwrap();
    let o = run(&["beampattern", cfg.to_str().unwrap(), "--phases-file", p, "--activation-file", p, "--grid-step-deg", "2", "--out", pat.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for key in ["main_lobe_db", "width_3db_deg", "sll_db"] {
        assert!(stdout(&o).contains(key));
    }
    let text = fs::read_to_string(pat).unwrap();
    assert_eq!(text.lines().next(), Some("theta_deg,phi_deg,gain_db"));
    assert_eq!(text.lines().count(), 1 + 91 * 91);
}

#[test]
fn frequency_override() {
    let cfg = config("single_element.toml");
    for f in ["f1", "f2", "10.5"] {
        let o = run(&["steer", cfg.to_str().unwrap(), "--theta-deg", "0", "--phi-deg", "0", "--frequency", f]);
        assert_eq!(o.status.code(), Some(0));
    }
    let o = run(&["steer", cfg.to_str().unwrap(), "--theta-deg", "0", "--phi-deg", "0", "--frequency", "fast"]);
    assert_eq!(o.status.code(), Some(2));
}
