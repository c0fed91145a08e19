use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    /// Unit circle with 240 points, every tenth kept as the sample, and the
    /// origin as landmark.
    fn circle() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let row = |i: usize| {
            let t = 2.0 * PI * i as f64 / 240.0;
            format!("{:?},{:?}\n", t.cos(), t.sin())
        };
        fs::write(dir.path().join("x.csv"), (0..240).map(row).collect::<String>()).unwrap();
        fs::write(dir.path().join("xhat.csv"), (0..240).step_by(10).map(row).collect::<String>()).unwrap();
        fs::write(dir.path().join("l.json"), r#"[{"type": "point", "coords": [0.0, 0.0]}]"#).unwrap();
        Self { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_adaptopo"))
            .args(args)
            .current_dir(self.dir.path())
            .output()
            .unwrap()
    }
}

const INFER: &[&str] = &[
    "infer", "--xhat", "xhat.csv", "--lhat", "l.json", "--beta", "0.5", "--eta", "0.15", "--asserted-wfs", "0.9",
];

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(bytes)))
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn read(p: &Path) -> Vec<u8> {
    fs::read(p).unwrap()
}

#[test]
fn infer_writes_report_and_svg() {
    let fx = Fixture::circle();
    let out = fx.run(&[INFER, &["--output", "out"]].concat());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&read(&fx.path("out/report.json")));
    assert_eq!(report["image_rank"], serde_json::json!([1, 1]));
    let svg = String::from_utf8(read(&fx.path("out/cover.svg"))).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    for layer in ["balls-large", "balls-small", "nerve-large", "nerve-small"] {
        assert!(svg.contains(layer), "{layer}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let fx = Fixture::circle();
    for dir in ["a", "b"] {
        assert_eq!(code(&fx.run(&[INFER, &["--output", dir]].concat())), 0);
    }
    for f in ["report.json", "cover.svg"] {
        assert_eq!(read(&fx.path(&format!("a/{f}"))), read(&fx.path(&format!("b/{f}"))), "{f}");
    }
    let args = ["validate", "distance-pts", "--xhat", "xhat.csv", "--lhat", "l.json", "--pairs", "20", "--seed", "7"];
    let first = fx.run(&args);
    assert_eq!(code(&first), 0, "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(first.stdout, fx.run(&args).stdout);
}

#[test]
fn missing_landmark_file_exits_2() {
    let fx = Fixture::circle();
    let out = fx.run(&["infer", "--xhat", "xhat.csv", "--lhat", "absent.json", "--asserted-wfs", "0.9"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out.stderr)["error"], "missing-input");
}

#[test]
fn eta_gate_exits_3_with_threshold() {
    let fx = Fixture::circle();
    let out = fx.run(&["infer", "--xhat", "xhat.csv", "--lhat", "l.json", "--eta", "0.9", "--asserted-wfs", "0.99"]);
    assert_eq!(code(&out), 3);
    let err = json(&out.stderr);
    assert_eq!(err["error"], "precondition");
    assert!(err["threshold"].is_f64());
}

#[test]
fn distance_matches_closed_form() {
    let fx = Fixture::circle();
    let out = fx.run(&["distance", "--lhat", "l.json", "--a", "1,0", "--b", "2.718281828459045,0", "--h", "0.01"]);
    assert_eq!(code(&out), 0);
    let r = json(&out.stdout);
    assert!((r["exact"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(r["relative_gap"].as_f64().unwrap() <= 0.02);

    let out = fx.run(&["distance", "--lhat", "l.json", "--a", "1,0", "--b", "0,1"]);
    let r = json(&out.stdout);
    assert!((r["graph_distance"].as_f64().unwrap() - PI / 2.0).abs() < 0.05 * PI / 2.0);

    let out = fx.run(&["distance", "--lhat", "l.json", "--a", "0.5,-0.5", "--b", "0.5,-0.5"]);
    assert_eq!(json(&out.stdout)["graph_distance"], 0.0);
}

#[test]
fn unreachable_target_exits_4() {
    let fx = Fixture::circle();
    fs::write(fx.path("wall.json"), r#"[{"type": "segment", "a": [0.0, -10.0], "b": [0.0, 10.0]}]"#).unwrap();
    let out = fx.run(&[
        "distance", "--lhat", "wall.json", "--a=-1,0", "--b", "1,0", "--domain=-2,-2,2,2", "--h", "0.05",
    ]);
    assert_eq!(code(&out), 4, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out.stderr)["error"], "unreachable");
}

#[test]
fn validate_and_negative_control() {
    let fx = Fixture::circle();
    let base = [
        "validate", "a-to-b", "--xhat", "xhat.csv", "--x", "x.csv", "--lhat", "l.json", "--probe-resolution", "80",
    ];
    let ok = fx.run(&base);
    assert_eq!(code(&ok), 0);
    let r = json(&ok.stdout);
    assert_eq!(r["violations"], 0);
    assert!(r["worst_margin"].as_f64().unwrap() <= 0.0);

    let bad = fx.run(&[&base[..], &["--negative-control"]].concat());
    assert_eq!(code(&bad), 5);
    assert!(json(&bad.stdout)["violations"].as_u64().unwrap() > 0);

    // AtoB spelled the other way
    let alias = fx.run(&[&["validate", "AtoB"], &base[2..]].concat());
    assert_eq!(alias.stdout, ok.stdout);
}

#[test]
fn inflated_epsilon_still_passes() {
    let fx = Fixture::circle();
    let out = fx.run(&[
        "validate", "x-to-xhat", "--xhat", "xhat.csv", "--x", "x.csv", "--lhat", "l.json", "--epsilon", "0.5",
        "--probe-resolution", "80",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn relation_requirements_and_names() {
    let fx = Fixture::circle();
    let out = fx.run(&["validate", "l-to-lhat", "--xhat", "xhat.csv", "--lhat", "l.json"]);
    assert_eq!(code(&out), 2);
    let out = fx.run(&["validate", "no-such-relation", "--xhat", "xhat.csv", "--lhat", "l.json"]);
    assert_ne!(code(&out), 0);
    assert!(json(&out.stderr)["message"].as_str().unwrap().contains("unknown relation"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let fx = Fixture::circle();
    fs::write(
        fx.path("run.json"),
        r#"{"xhat": "xhat.csv", "lhat": "l.json", "beta": 0.5, "eta": 0.9, "asserted_wfs": 0.9}"#,
    )
    .unwrap();
    assert_eq!(code(&fx.run(&["infer", "--config", "run.json"])), 3);
    let out = fx.run(&["infer", "--config", "run.json", "--eta", "0.15"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out.stdout)["image_rank"], serde_json::json!([1, 1]));

    fs::write(fx.path("typo.json"), r#"{"etta": 0.1}"#).unwrap();
    let out = fx.run(&["infer", "--config", "typo.json"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn sample_check_and_render() {
    let fx = Fixture::circle();
    let out = fx.run(&["sample-check", "--xhat", "xhat.csv", "--x", "x.csv", "--lhat", "l.json", "--beta", "0.3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out.stdout);
    let chord = 2.0 * (5.0 * PI / 240.0).sin();
    assert!((r["epsilon_star"].as_f64().unwrap() - chord).abs() < 1e-12);

    let out = fx.run(&["render", "--xhat", "xhat.csv", "--lhat", "l.json", "--eta", "0.15"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("samples"));
}

#[test]
fn thread_count_variable_is_checked() {
    let fx = Fixture::circle();
    let out = Command::new(env!("CARGO_BIN_EXE_adaptopo"))
        .args(INFER)
        .env("ADAPTOPO_THREADS", "2")
        .current_dir(fx.dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let out = Command::new(env!("CARGO_BIN_EXE_adaptopo"))
        .args(INFER)
        .env("ADAPTOPO_THREADS", "many")
        .current_dir(fx.dir.path())
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
}
