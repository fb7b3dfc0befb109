use std::path::Path;
use std::process::{Command, Output};

fn genus2(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genus2"))
        .args(args)
        .env_remove("GENUS2_CONFIG")
        .output()
        .expect("run genus2")
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("genus2-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(genus2(&["verify", "nope"]).status.code(), Some(2));
    assert_eq!(genus2(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        genus2(&["intersect", "--eps", "0.3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        genus2(&["sample", "level-set-kappa", "--level", "1.5"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        genus2(&["--tol", "bogus=1", "critical-points"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(genus2(&["fiber", "1", "0"]).status.code(), Some(2));
}

#[test]
fn critical_points_census() {
    let o = genus2(&["critical-points", "--grid-n", "8"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("5 critical points"));
}

#[test]
fn fiber_json() {
    let o = genus2(&["fiber", "1", "0", "0", "0", "0", "0"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("\"single_orbit\": true"));
    assert!(text.contains("\"tau_pairing\""));
    assert!(text.contains("\"bounds\""));

    let o = genus2(&["fiber", "2", "0", "0", "0", "-1", "0"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("renormalizing"));
}

#[test]
fn flow_writes_lines_and_summary() {
    let dir = tmp("flow");
    let o = genus2(&[
        "--out",
        dir.to_str().unwrap(),
        "--seed",
        "3",
        "flow",
        "--lines",
        "5",
        "--corners",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("4 corner hits"));
    let summary = std::fs::read_to_string(dir.join("flow/summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 6);
    assert!(summary.starts_with("line,x0,y0,z0,terminal_flag"));
    for n in 0..5 {
        assert!(dir.join(format!("flow/line_{n:04}.csv")).exists());
    }
    let first = std::fs::read(dir.join("flow/line_0004.csv")).unwrap();
    let o = genus2(&[
        "--out",
        dir.to_str().unwrap(),
        "--seed",
        "3",
        "flow",
        "--lines",
        "5",
        "--corners",
    ]);
    assert!(o.status.success());
    assert_eq!(
        first,
        std::fs::read(dir.join("flow/line_0004.csv")).unwrap()
    );
}

#[test]
fn intersect_writes_reports() {
    let dir = tmp("intersect");
    let o = genus2(&["--out", dir.to_str().unwrap(), "intersect", "--eps", "0.05"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("8 intersection points"));
    let csv = std::fs::read_to_string(dir.join("intersect.csv")).unwrap();
    assert!(csv.starts_with("t,alpha,beta,residual,margin,component_id,component_type"));
    assert_eq!(csv.lines().filter(|l| l.ends_with(",point")).count(), 8);
    assert!(Path::new(&dir.join("intersect.json")).exists());
}

#[test]
fn sample_and_config_precedence() {
    let dir = tmp("sample");
    let cfg = dir.join("run.cfg");
    std::fs::write(
        &cfg,
        format!(
            "seed = 5\noutput_dir = {}\n",
            dir.join("from-file").display()
        ),
    )
    .unwrap();
    let o = genus2(&[
        "--config",
        cfg.to_str().unwrap(),
        "sample",
        "psi-image",
        "--count",
        "4",
    ]);
    assert!(o.status.success());
    let a = std::fs::read_to_string(dir.join("from-file/sample-psi-image.csv")).unwrap();
    assert_eq!(a.lines().count(), 5);

    let flag_out = dir.join("from-flag");
    let o = genus2(&[
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        flag_out.to_str().unwrap(),
        "--seed",
        "5",
        "sample",
        "psi-image",
        "--count",
        "4",
    ]);
    assert!(o.status.success());
    assert_eq!(
        a,
        std::fs::read_to_string(flag_out.join("sample-psi-image.csv")).unwrap()
    );

    let o = Command::new(env!("CARGO_BIN_EXE_genus2"))
        .args(["sample", "psi-image", "--count", "4", "--seed", "6"])
        .env("GENUS2_CONFIG", &cfg)
        .output()
        .unwrap();
    assert!(o.status.success());
    let b = std::fs::read_to_string(dir.join("from-file/sample-psi-image.csv")).unwrap();
    assert_ne!(a, b);
}

#[test]
fn verify_json_and_text() {
    let o = genus2(&["verify", "quat", "--tol", "samples.quat=100"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("PASS trace identity"));
    let o = genus2(&["--json", "verify", "quat", "--tol", "samples.quat=100"]);
    assert!(o.status.success());
    assert!(stdout(&o).trim_start().starts_with('{'));
}
