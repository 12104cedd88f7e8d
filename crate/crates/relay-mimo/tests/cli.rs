//! End-to-end checks of the command-line interface and its exit codes.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_relay-mimo"))
}

const GOOD_SPEC: &str = r#"
[scenario]
n1 = 2
n2 = 2
nr = 2
m_p = 1
n_p1 = 1
n_p2 = 1
constellation = "bpsk"

[campaign]
snr_db = [0.0, 4.0, 8.0]
modes = ["analytic"]
seed = 11
"#;

fn write_spec(dir: &std::path::Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("spec.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn tmpdir(tag: &str) -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("relay-mimo-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn validate_accepts_good_spec() {
    let dir = tmpdir("validate");
    let spec = write_spec(&dir, GOOD_SPEC);
    let out = bin().args(["validate", "--spec"]).arg(&spec).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn validate_rejects_bad_spec_with_exit_1() {
    let dir = tmpdir("badspec");
    let spec = write_spec(&dir, &GOOD_SPEC.replace("[0.0, 4.0, 8.0]", "[8.0, 4.0]"));
    let out = bin().args(["validate", "--spec"]).arg(&spec).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn run_writes_results_and_manifest() {
    let dir = tmpdir("run");
    let spec = write_spec(&dir, GOOD_SPEC);
    let out_path = dir.join("results.csv");
    let out = bin()
        .args(["run", "--spec"])
        .arg(&spec)
        .args(["--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("# schema: results-v1"));
    assert!(text.lines().any(|l| l.starts_with("snr_db,")));
    // three analytic rows
    assert_eq!(text.lines().filter(|l| l.contains(",analytic,")).count(), 3);
    let manifest = std::fs::read_to_string(dir.join("results.csv.manifest.toml")).unwrap();
    assert!(manifest.contains("seed = 11"));
    assert!(manifest.contains("[provenance]"));
}

#[test]
fn run_seed_override_lands_in_manifest() {
    let dir = tmpdir("seed");
    let spec = write_spec(&dir, GOOD_SPEC);
    let out_path = dir.join("r.csv");
    let out = bin()
        .args(["run", "--spec"])
        .arg(&spec)
        .args(["--seed", "99", "--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let manifest = std::fs::read_to_string(dir.join("r.csv.manifest.toml")).unwrap();
    assert!(manifest.contains("seed = 99"));
}

#[test]
fn run_jsonl_to_stdout() {
    let dir = tmpdir("jsonl");
    let spec = write_spec(&dir, GOOD_SPEC);
    let out = bin()
        .args(["run", "--spec"])
        .arg(&spec)
        .args(["--format", "jsonl"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.lines().count(), 3);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["ber"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn slope_reports_fit_and_theory() {
    let dir = tmpdir("slope");
    // q = 1 scenario so the theory line is printed
    let spec_text = GOOD_SPEC.replace("nr = 2", "nr = 1").replace(
        "snr_db = [0.0, 4.0, 8.0]",
        "snr_db = [20.0, 30.0, 40.0]",
    );
    let spec = write_spec(&dir, &spec_text);
    let out_path = dir.join("curve.csv");
    let run = bin()
        .args(["run", "--spec"])
        .arg(&spec)
        .args(["--out"])
        .arg(&out_path)
        .output()
        .unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let out = bin().arg("slope").arg(&out_path).args(["--spec"]).arg(&spec).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("analytic"), "{text}");
    assert!(text.contains("theory"), "{text}");
}

#[test]
fn workers_flag_does_not_change_results() {
    let dir = tmpdir("workers");
    let spec_text = GOOD_SPEC
        .replace("modes = [\"analytic\"]", "modes = [\"sim-perfect-csi\"]")
        + "max_trials = 20000\nmin_error_events = 1000000\n";
    let spec = write_spec(&dir, &spec_text);
    let mut outputs = Vec::new();
    for workers in ["1", "4"] {
        let out = bin()
            .args(["run", "--spec"])
            .arg(&spec)
            .args(["--workers", workers])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        outputs.push(out.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
}
