use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const SMOKE: &str = r#"
seed = 11

[generator]
horizon_days = 45
n_dealers = 2

[generator.trucks_per_dealer]
lo = 2
hi = 3

[forecast]
train_days = 30
tuning_window_days = 7
seasonal_period_days = 7

[grid]
enabled = false
"#;

fn sparesim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparesim")).args(args).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.in.toml");
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn print_defaults_is_loadable() {
    let out = sparesim(&["--print-defaults"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[generator]") && text.contains("[policy]") && text.contains("[grid]"));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &text);
    let out = sparesim(&["generate", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap(), "--jobs", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read_dir(dir.path().join("o/scenarios")).unwrap().count(), 48);
}

#[test]
fn run_all_then_stages_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMOKE);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let (a, b) = (a.to_str().unwrap(), b.to_str().unwrap());

    let out = sparesim(&["run-all", "--config", &cfg, "--out", a, "--jobs", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("croston"));

    for args in [
        vec!["generate", "--config", &cfg, "--out", b],
        vec!["forecast", "--out", b],
        vec!["simulate", "--out", b],
        vec!["analyze", "--out", b],
    ] {
        let out = sparesim(&args);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["metrics.csv", "kpi.csv", "analysis/summary.csv", "analysis/regressions.csv"] {
        assert_eq!(fs::read(Path::new(a).join(f)).unwrap(), fs::read(Path::new(b).join(f)).unwrap(), "{f}");
    }
}

#[test]
fn model_subset_and_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMOKE);
    let out_dir = dir.path().join("o");
    let o = out_dir.to_str().unwrap();
    let out = sparesim(&["run-all", "--config", &cfg, "--out", o, "--models", "croston,tsb", "--seed", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let kpi = fs::read_to_string(out_dir.join("kpi.csv")).unwrap();
    let models: std::collections::BTreeSet<&str> = kpi.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(models.into_iter().collect::<Vec<_>>(), ["croston", "tsb"]);
    let manifest = fs::read_to_string(out_dir.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"master_seed\": 5"));
}

#[test]
fn failures_exit_nonzero_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMOKE);
    let o = dir.path().join("o");
    let out = sparesim(&["run-all", "--config", &cfg, "--out", o.to_str().unwrap(), "--models", "arima"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("arima"));

    let bad = write_config(dir.path(), "[policy]\nlead_time = 3\n");
    let out = sparesim(&["generate", "--config", &bad, "--out", o.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("lead_time"));

    let out = sparesim(&["simulate", "--out", dir.path().join("missing").to_str().unwrap()]);
    assert!(!out.status.success());
}
