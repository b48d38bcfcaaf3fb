use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn demo_scene() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/src/harness/demo_scene.json")
}

fn hessval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hessval")).args(args).output().expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn measures_writes_expected_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = hessval(&["measures", "--scene", path_str(&demo_scene()), "--out", path_str(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("measures.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("function,window,dim,theta_0,theta_1,theta_2,theta_3,error"));
    assert!(csv.lines().any(|l| l == "abs,unit_1d,1,2,2,,,"), "{csv}");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("wrote "), "{stdout}");
}

#[test]
fn verify_duality_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = hessval(&["verify", "--suite", "duality", "--scene", path_str(&demo_scene()), "--out", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verify duality: pass"));
    assert!(dir.path().join("verify.csv").exists());
    assert!(dir.path().join("verify.json").exists());
}

#[test]
fn impossible_tolerance_fails_the_suite() {
    let dir = tempfile::tempdir().unwrap();
    let out = hessval(&[
        "verify",
        "--suite",
        "duality",
        "--tol",
        "duality=0",
        "--scene",
        path_str(&demo_scene()),
        "--out",
        path_str(dir.path()),
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(1), "{stdout}");
    assert!(stdout.contains("verify duality: FAIL"), "{stdout}");
    assert!(dir.path().join("verify.csv").exists());
}

#[test]
fn unknown_kernel_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(demo_scene()).unwrap().replace("\"kernel\": \"tent\"", "\"kernel\": \"nosuch\"");
    let scene = dir.path().join("scene.json");
    std::fs::write(&scene, text).unwrap();
    let out = hessval(&["valuation", "--scene", path_str(&scene), "--out", path_str(&dir.path().join("o"))]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("schema error at experiments[") && stderr.contains("nosuch"), "{stderr}");
}

#[test]
fn unknown_command_and_suite_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let scene = demo_scene();
    let out = hessval(&["frobnicate", "--scene", path_str(&scene), "--out", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown command"));

    let out = hessval(&["verify", "--suite", "nosuch", "--scene", path_str(&scene), "--out", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

#[test]
fn missing_scene_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = hessval(&["measures", "--scene", path_str(&dir.path().join("absent.json")), "--out", path_str(dir.path())]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn artifacts_are_byte_identical_across_runs() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        for cmd in ["measures", "valuation"] {
            let out = hessval(&[cmd, "--scene", path_str(&demo_scene()), "--out", path_str(dir.path()), "--seed", "7"]);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        }
        let out = hessval(&["verify", "--suite", "duality", "--scene", path_str(&demo_scene()), "--out", path_str(dir.path()), "--seed", "7"]);
        assert!(out.status.success());
    }
    for name in ["measures.csv", "valuations.csv", "verify.csv", "verify.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between runs");
    }
}
