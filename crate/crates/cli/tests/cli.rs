use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn helmsource(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helmsource")).args(args).output().unwrap()
}

fn recipe(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "experiments", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn reconstruct_writes_outputs_and_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let names = ["data.csv", "reconstruction_001.csv", "summary.json"];
    let mut snapshots = Vec::new();
    for _ in 0..2 {
        let run = helmsource(&[
            "reconstruct", "--source", "f1", "--k", "0.5", "--truncation", "17", "--noise-delta", "0.01", "--seed", "3",
            "--out", path(dir.path()),
        ]);
        assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
        assert!(String::from_utf8_lossy(&run.stdout).contains("error="));
        snapshots.push(names.map(|n| fs::read(dir.path().join(n)).unwrap()));
    }
    assert!(snapshots[0].iter().all(|b| !b.is_empty()));
    assert_eq!(snapshots[0], snapshots[1]);
    let summary = fs::read_to_string(dir.path().join("summary.json")).unwrap();
    assert!(summary.contains("\"schema_version\": 1"));
    assert!(summary.contains("\"seed\": 3"));
}

#[test]
fn flags_override_config_fields() {
    let dir = tempfile::tempdir().unwrap();
    let run = helmsource(&[
        "reconstruct", "--config", &recipe("dl_gaussian_k0.5.json"), "--truncation", "9", "--k", "0.75",
        "--out", path(dir.path()),
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["truncation"], 9);
    assert_eq!(summary["config"]["k_values"][0], 0.75);
    assert_eq!(summary["config"]["method"], "dl");
    assert_eq!(summary["results"][0]["truncation"], 9);
}

#[test]
fn forward_writes_neumann_columns() {
    let dir = tempfile::tempdir().unwrap();
    let run = helmsource(&["forward", "--source", "f3", "--k", "0.5,1.5", "--out", path(dir.path())]);
    assert_eq!(code(&run), 0);
    let csv = fs::read_to_string(dir.path().join("data.csv")).unwrap();
    assert!(csv.starts_with("j,k,m,theta,re_u,im_u,re_du,im_du\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 100);
}

#[test]
fn sweep_flags_drive_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let run = helmsource(&[
        "sweep-noise", "--source", "f3", "--k", "0.5", "--deltas", "0,0.02", "--truncations", "6,6", "--seeds", "3",
        "--out", path(dir.path()),
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let means = fs::read_to_string(dir.path().join("sweep_means.csv")).unwrap();
    assert_eq!(means.lines().count(), 3);
    let rows = fs::read_to_string(dir.path().join("sweep_rows.csv")).unwrap();
    assert_eq!(rows.lines().count(), 1 + 2 * 3);
}

#[test]
fn validate_reports_and_fails_on_loose_quadrature() {
    let dir = tempfile::tempdir().unwrap();
    let ok = helmsource(&["validate", "--source", "f1", "--k", "0.5", "--out", path(dir.path())]);
    assert_eq!(code(&ok), 0);
    assert!(dir.path().join("validation.json").exists());
    let stdout = String::from_utf8_lossy(&ok.stdout);
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")));

    let cfg = dir.path().join("coarse.json");
    fs::write(
        &cfg,
        r#"{"method": "dl", "source": {"profile": "f1"}, "k_values": [2.99],
            "quadrature": {"panels_x1": 8, "panels_x2": 8}, "tolerances": {"quadrature": 1e-12}}"#,
    )
    .unwrap();
    let bad = helmsource(&["validate", "--config", path(&cfg), "--out", path(&dir.path().join("bad"))]);
    assert_eq!(code(&bad), 2);
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL forward-quadrature-doubling"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = path(dir.path());
    assert_eq!(code(&helmsource(&["reconstruct", "--source", "f9", "--out", out])), 1);
    assert_eq!(code(&helmsource(&["reconstruct", "--out", out])), 1);
    assert_eq!(code(&helmsource(&["reconstruct", "--source", "f1", "--method", "xx"])), 1);
    assert_eq!(code(&helmsource(&["reconstruct", "--config", "/nonexistent.json"])), 1);
    // sqrt(k^2 - 1) = 4 makes the only DL mode's transverse integral vanish
    let k = 17f64.sqrt().to_string();
    let degenerate = helmsource(&["reconstruct", "--source", "f1", "--k", &k, "--truncation", "1", "--out", out]);
    assert_eq!(code(&degenerate), 3, "{}", String::from_utf8_lossy(&degenerate.stderr));
    let summary = fs::read_to_string(dir.path().join("summary.json")).unwrap();
    assert!(summary.contains("\"status\": \"degenerate\""));
    assert!(!summary.contains("NaN"));
    assert_eq!(code(&helmsource(&["--help"])), 0);
}
