//! The `orbitlens` binary: exit codes, error messages and output files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn pack(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("pack")
        .join(name)
}

fn orbitlens(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_orbitlens"));
    cmd.args(args).env_remove("ORBITLENS_THREADS");
    if let Some(t) = threads {
        cmd.env("ORBITLENS_THREADS", t);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, json: &str) -> String {
    let path = dir.join("job.json");
    std::fs::write(&path, json).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn classify_writes_report_and_timing_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let cfg = pack("classify_disc.json");
    let o = orbitlens(
        &[
            "classify",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(report["command"], "classify");
    assert_eq!(report["result"]["classify"]["class"]["kind"], "hyperbolic");
    let timing: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("r.json.timing.json")).unwrap())
            .unwrap();
    assert!(timing["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert!(report.get("wall_time_seconds").is_none());
}

#[test]
fn report_goes_to_stdout_without_out() {
    let cfg = pack("classify_disc.json");
    let o = orbitlens(&["classify", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["command"], "classify");
}

#[test]
fn inconclusive_series_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"generator": {"type": "ball", "center": [["0.5", "0"], ["0", "0"]]}, "knobs": {"k": 10}}"#,
    );
    let o = orbitlens(&["series", "--config", &cfg], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failing_verification_exits_one_and_still_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let cfg = write_config(dir.path(), r#"{"suite": "verdicts", "knobs": {"seed": 7}}"#);
    let o = orbitlens(
        &["verify", "--config", &cfg, "--out", out.to_str().unwrap()],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(report["result"]["verify"]["passed"], false);
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"generator": {"type": "disc", "p": ["2", "0"], "q": ["x", "0"]}}"#,
    );
    let o = orbitlens(&["classify", "--config", &cfg], None);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("generator.q[0]"), "{err}");

    let o = orbitlens(&["explode", "--config", &cfg], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("explode"));
}

#[test]
fn render_writes_ppm_and_needs_an_image() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = pack("render_ball.json");
    let image = dir.path().join("o.ppm");
    let o = orbitlens(
        &[
            "render",
            "--config",
            cfg.to_str().unwrap(),
            "--image",
            image.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(std::fs::read(&image).unwrap().starts_with(b"P6\n"));

    let o = orbitlens(&["render", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("outputs.image"));
}

#[test]
fn config_command_must_match() {
    let cfg = pack("orbit_disc.json");
    let o = orbitlens(&["classify", "--config", cfg.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&o.stderr).contains("config is for `orbit`, invoked as `classify`")
    );
}

#[test]
fn thread_count_is_honored_and_validated() {
    let cfg = pack("limitset_ball.json");
    let one = orbitlens(&["limitset", "--config", cfg.to_str().unwrap()], Some("1"));
    let four = orbitlens(&["limitset", "--config", cfg.to_str().unwrap()], Some("4"));
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);

    let bad = orbitlens(
        &["limitset", "--config", cfg.to_str().unwrap()],
        Some("zero"),
    );
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("ORBITLENS_THREADS"));
}
