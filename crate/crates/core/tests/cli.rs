//! End-to-end runs of the barren-lab binary: exit codes, stdout shape, CSV
//! determinism, and manifest round trips.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use barren_lab::circuit::from_json;

const CSV_HEADER: &str = "n,d,observable,entangler,replacement_mode,fraction,samples,seed,m_effective,mean_grad,stderr_mean,var_grad,stderr_var,pred_eq6,pred_eq12_alpha,alpha_used";

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_barren-lab")
}

fn temp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("barren_lab_bin_{}_{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(binary()).args(args).output().expect("binary spawns")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn verify_prints_the_documented_divergence_and_exits_clean() {
    let out = run(&["verify"]);
    let stdout = stdout_of(&out);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("EXPECTED-DIVERGENCE"), "{stdout}");
    assert!(stdout.contains("0 failed"), "{stdout}");
    for line in stdout.lines() {
        assert!(!line.starts_with("FAIL"), "{line}");
    }
}

#[test]
fn lightcone_grid_shows_six_gray_slots() {
    let dir = temp_dir("lightcone");
    let config_path = dir.join("fig.json");
    fs::write(&config_path, r#"{"n_list": [4], "d_list": [3], "observables": ["ZIII"]}"#).unwrap();
    let out_path = dir.join("cone.json");

    let out = run(&[
        "lightcone",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    let stdout = stdout_of(&out);
    assert!(out.status.success(), "{stdout}");
    assert!(stdout.contains("effective m = 6 of 12 slots (m/(nd) = 0.5000)"), "{stdout}");
    let gray: usize = stdout
        .lines()
        .filter(|l| l.starts_with("qubit"))
        .map(|l| l.matches('.').count())
        .sum();
    assert_eq!(gray, 6, "{stdout}");

    let artifact: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(artifact["report"]["m"], 6);
    assert_eq!(artifact["observable"], "ZIII");
}

#[test]
fn sweep_rows_are_sorted_reproducible_and_manifest_rerunnable() {
    let dir = temp_dir("sweep");
    let config_path = dir.join("sweep.json");
    fs::write(
        &config_path,
        r#"{"experiment": "variance_sweep", "n_list": [2], "d_list": [4, 2],
            "observables": ["Z"], "samples": 8, "master_seed": 11}"#,
    )
    .unwrap();
    let csv_path = dir.join("rows.csv");

    let out = run(&[
        "sweep",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        csv_path.to_str().unwrap(),
        "--sequential",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let first = fs::read_to_string(&csv_path).unwrap();
    assert_eq!(first.lines().next(), Some(CSV_HEADER));
    assert_eq!(first.lines().count(), 3, "{first}");
    let depths: Vec<&str> =
        first.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(depths, vec!["2", "4"], "depth-sorted despite the config listing 4 first");

    let again = run(&[
        "sweep",
        "--config",
        config_path.to_str().unwrap(),
        "--out",
        csv_path.to_str().unwrap(),
        "--sequential",
    ]);
    assert!(again.status.success());
    assert_eq!(first, fs::read_to_string(&csv_path).unwrap(), "same config, same bytes");

    // the manifest alone must reproduce the CSV
    let manifest_path = dir.join("rows.manifest.json");
    let replay_path = dir.join("replay.csv");
    let replay = run(&[
        "sweep",
        "--config",
        manifest_path.to_str().unwrap(),
        "--out",
        replay_path.to_str().unwrap(),
        "--sequential",
    ]);
    assert!(replay.status.success(), "{}", String::from_utf8_lossy(&replay.stderr));
    assert_eq!(first, fs::read_to_string(&replay_path).unwrap());
}

#[test]
fn config_mistakes_exit_with_code_two() {
    let dir = temp_dir("badcfg");
    let bad = dir.join("bad.json");
    fs::write(&bad, r#"{"experiment": "nope"}"#).unwrap();
    let out = run(&["sweep", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));

    // sweep refuses the one-shot experiment kinds
    let mismatched = dir.join("verify.json");
    fs::write(&mismatched, r#"{"experiment": "verify"}"#).unwrap();
    let out = run(&["sweep", "--config", mismatched.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep"));

    let missing = dir.join("never_written.json");
    let out = run(&["verify", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sample_emits_a_parseable_circuit() {
    let dir = temp_dir("sample");
    let config_path = dir.join("sample.json");
    fs::write(&config_path, r#"{"n_list": [3], "d_list": [2], "observables": ["Z"]}"#).unwrap();

    let out = run(&["sample", "--config", config_path.to_str().unwrap()]);
    assert!(out.status.success());
    let c = from_json(&stdout_of(&out)).unwrap();
    assert_eq!(c.n, 3);
    assert_eq!(c.d(), 2);

    let other = run(&["sample", "--config", config_path.to_str().unwrap(), "--index", "1"]);
    let c1 = from_json(&stdout_of(&other)).unwrap();
    assert_eq!(c1.n, 3);
    assert_ne!(c.theta, c1.theta, "different ensemble draws differ");
}
