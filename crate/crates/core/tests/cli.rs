use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ranpower"))
}

#[test]
fn run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "rings = 1\nepisodes = 40\niterations = 5\nagent = \"sleep\"\narrival_prob = 0.2\n").unwrap();
    let out = dir.path().join("out");
    let st = bin().args(["run", "--quiet", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert_eq!(st.code(), Some(0));
    assert_eq!(fs::read_to_string(out.join("metrics.csv")).unwrap().lines().count(), 41);
    assert!(out.join("summary.json").exists());
}

#[test]
fn invalid_values_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "epsilon = 1.5\n").unwrap();
    let o = bin().args(["run", "--quiet", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilon"));
}

#[test]
fn syntax_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "rings = 1\nepisodes = = 3\n").unwrap();
    let o = bin().args(["run", "--quiet", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn unknown_keys_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "colour = 3\n").unwrap();
    let o = bin().args(["run", "--quiet", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn missing_config_file_exits_with_two() {
    let o = bin().args(["run", "--quiet", "--config", "/nonexistent/ranpower.toml"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_refuses_large_instances() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    fs::write(&cfg, "rings = 2\nepisodes = 5\narrival_prob = 1.0\nagent = \"sleep\"\n").unwrap();
    let o = bin().args(["oracle", "--quiet", "--config"]).arg(&cfg).arg("--out").arg(dir.path().join("o")).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
