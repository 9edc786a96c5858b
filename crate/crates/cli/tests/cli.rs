use std::path::Path;
use std::process::{Command, Output};

fn phaseless(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phaseless"))
        .args(args)
        .current_dir(cwd)
        .env("RUST_BACKTRACE", "0")
        .output()
        .unwrap()
}

fn ok(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// The disk preset with a short chain and sampled noise.
fn short_disk_config(dir: &Path) {
    let preset = ok(&phaseless(&["preset", "disk"], dir));
    let mut cfg: serde_json::Value = serde_json::from_str(&preset).unwrap();
    cfg["chain"]["burn_in"] = 30.into();
    cfg["chain"]["count"] = 4.into();
    cfg["noise"] = serde_json::json!({ "mode": "sampled" });
    std::fs::write(dir.join("disk.json"), cfg.to_string()).unwrap();
}

#[test]
fn simulate_invert_stats() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    short_disk_config(dir);

    let listed = ok(&phaseless(&["simulate", "--config", "disk.json", "--out", "run"], dir));
    assert!(listed.lines().any(|l| l.ends_with("obs.csv")));
    assert!(dir.join("run/obs.csv.manifest.json").exists());

    let summary = ok(&phaseless(
        &["invert", "--config", "disk.json", "--obs", "run/obs.csv", "--out", "run"],
        dir,
    ));
    let summary: serde_json::Value = serde_json::from_str(&summary).unwrap();
    assert_eq!(summary["samples"], 4);
    assert_eq!(summary["components"][2]["name"], "r");

    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.join("run/chain.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 1);
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);

    let again = ok(&phaseless(
        &["stats", "--config", "disk.json", "--chain", "run/chain.csv", "--out", "stats"],
        dir,
    ));
    let again: serde_json::Value = serde_json::from_str(&again).unwrap();
    assert_eq!(again, summary);
}

#[test]
fn seed_flag_changes_the_noise() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    short_disk_config(dir);
    ok(&phaseless(&["simulate", "--config", "disk.json", "--out", "a"], dir));
    ok(&phaseless(&["simulate", "--config", "disk.json", "--seed", "9", "--out", "b"], dir));
    ok(&phaseless(&["simulate", "--config", "disk.json", "--out", "c"], dir));
    let read = |p: &str| std::fs::read(dir.join(p)).unwrap();
    assert_ne!(read("a/obs.csv"), read("b/obs.csv"));
    assert_eq!(read("a/obs.csv"), read("c/obs.csv"));
}

#[test]
fn figure8_writes_a_table() {
    let tmp = tempfile::tempdir().unwrap();
    let printed = ok(&phaseless(&["experiment", "figure8", "--out", "exp"], tmp.path()));
    let table = std::fs::read_to_string(tmp.path().join(printed.trim())).unwrap();
    assert_eq!(table.lines().next(), Some("k,r,modulus"));
    assert_eq!(table.lines().count(), 1 + 8 * 200);
}

#[test]
fn bad_input_fails_cleanly() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let unknown = phaseless(&["experiment", "table9"], dir);
    assert!(!unknown.status.success());
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("table9"));

    assert!(!phaseless(&["simulate"], dir).status.success());
    assert!(!phaseless(&["invert", "--family", "disk", "--obs", "nope.csv"], dir).status.success());
    assert!(!phaseless(&["simulate", "--family", "ellipse"], dir).status.success());
}
