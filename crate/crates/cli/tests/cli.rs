use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sample_data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/sample_prices.csv")
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ito-lab"))
        .current_dir(dir)
        .env_remove("ITOLAB_SEED")
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn help_and_version_exit_zero() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(d.path(), &["--help"])), 0);
    assert_eq!(code(&run(d.path(), &["--version"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(d.path(), &[])), 1);
    assert_eq!(code(&run(d.path(), &["frobnicate"])), 1);
    assert_eq!(code(&run(d.path(), &["simulate-bm", "--out", "x.csv"])), 1);
    assert_eq!(
        code(&run(
            d.path(),
            &["simulate-bm", "--steps", "4", "--bogus", "--out", "x.csv"]
        )),
        1
    );
    assert_eq!(
        code(&run(
            d.path(),
            &[
                "calibrate",
                "--input",
                "p.csv",
                "--mode",
                "magic",
                "--out",
                "x.json"
            ]
        )),
        1
    );
}

#[test]
fn validation_errors_exit_two_and_name_the_flag() {
    let d = tempfile::tempdir().unwrap();
    let o = run(
        d.path(),
        &[
            "project",
            "--gamma",
            "0",
            "--sigma",
            "-1",
            "--initial",
            "1",
            "--days",
            "5",
            "--out",
            "e.csv",
        ],
    );
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--sigma"));
    assert!(!d.path().join("e.csv").exists());

    let o = run(
        d.path(),
        &[
            "--threads",
            "0",
            "simulate-bm",
            "--steps",
            "4",
            "--out",
            "b.csv",
        ],
    );
    assert_eq!(code(&o), 2);
    assert_eq!(
        code(&run(
            d.path(),
            &["calibrate", "--input", "missing.csv", "--out", "p.json"]
        )),
        2
    );

    std::fs::write(
        d.path().join("bad.csv"),
        "date,close\n2020-01-02,1.0\n2020-01-01,2.0\n",
    )
    .unwrap();
    assert_eq!(
        code(&run(
            d.path(),
            &["calibrate", "--input", "bad.csv", "--out", "p.json"]
        )),
        2
    );
    std::fs::write(
        d.path().join("neg.csv"),
        "date,close\n2020-01-01,1.0\n2020-01-02,-2.0\n",
    )
    .unwrap();
    assert_eq!(
        code(&run(
            d.path(),
            &["calibrate", "--input", "neg.csv", "--out", "p.json"]
        )),
        2
    );
}

#[test]
fn numerical_failure_exits_three_without_partial_output() {
    let d = tempfile::tempdir().unwrap();
    let o = run(
        d.path(),
        &[
            "project",
            "--gamma",
            "0",
            "--sigma",
            "1000",
            "--initial",
            "1",
            "--days",
            "252",
            "--out",
            "e.csv",
        ],
    );
    assert_eq!(code(&o), 3);
    assert!(!d.path().join("e.csv").exists());
    assert!(!d.path().join("e.csv.manifest.json").exists());
}

#[test]
fn simulate_bm_layout_and_manifest() {
    let d = tempfile::tempdir().unwrap();
    let o = run(
        d.path(),
        &[
            "simulate-bm",
            "--steps",
            "4",
            "--paths",
            "3",
            "--seed",
            "11",
            "--out",
            "bm.csv",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(d.path().join("bm.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,path_0,path_1,path_2");
    assert_eq!(lines.len(), 6);
    for line in &lines[1..] {
        let t: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&t));
    }
    let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(first, vec![0.0; 4]);

    let m = json(&d.path().join("bm.csv.manifest.json"));
    assert_eq!(m["cmd"], "simulate-bm");
    assert_eq!(m["seed"], 11);
    assert_eq!(m["flags"]["steps"], 4);
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn seed_from_environment() {
    let d = tempfile::tempdir().unwrap();
    let with_env = Command::new(env!("CARGO_BIN_EXE_ito-lab"))
        .current_dir(d.path())
        .env("ITOLAB_SEED", "42")
        .args(["simulate-bm", "--steps", "8", "--out", "a.csv"])
        .output()
        .unwrap();
    assert!(with_env.status.success());
    assert!(run(
        d.path(),
        &[
            "simulate-bm",
            "--steps",
            "8",
            "--seed",
            "42",
            "--out",
            "b.csv"
        ]
    )
    .status
    .success());
    assert_eq!(
        std::fs::read(d.path().join("a.csv")).unwrap(),
        std::fs::read(d.path().join("b.csv")).unwrap()
    );
}

#[test]
fn different_seeds_differ() {
    let d = tempfile::tempdir().unwrap();
    run(
        d.path(),
        &[
            "simulate-bm",
            "--steps",
            "8",
            "--seed",
            "1",
            "--out",
            "a.csv",
        ],
    );
    run(
        d.path(),
        &[
            "simulate-bm",
            "--steps",
            "8",
            "--seed",
            "2",
            "--out",
            "b.csv",
        ],
    );
    assert_ne!(
        std::fs::read(d.path().join("a.csv")).unwrap(),
        std::fs::read(d.path().join("b.csv")).unwrap()
    );
}

#[test]
fn calibrate_paper_mode_regression() {
    let d = tempfile::tempdir().unwrap();
    let input = sample_data();
    let o = run(
        d.path(),
        &[
            "calibrate",
            "--input",
            input.to_str().unwrap(),
            "--mode",
            "paper",
            "--end",
            "2019-12-31",
            "--out",
            "p.json",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let p = json(&d.path().join("p.json"));
    let gamma = p["gamma"].as_f64().unwrap();
    let sigma = p["sigma"].as_f64().unwrap();
    assert!((gamma - 0.000_713_964_586_295_535_9).abs() <= 1e-12 * gamma.abs());
    assert!((sigma - 0.000_269_597_451_940_203_5).abs() <= 1e-12 * sigma);
    assert_eq!(p["mode"], "paper");
    assert_eq!(p["start_date"], "2007-10-11");
    assert_eq!(p["end_date"], "2019-12-31");

    let m = json(&d.path().join("p.json.manifest.json"));
    let digest = m["inputs"][0]["sha256"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
}

#[test]
fn project_accepts_calibrated_params() {
    let d = tempfile::tempdir().unwrap();
    let input = sample_data();
    assert!(run(
        d.path(),
        &[
            "calibrate",
            "--input",
            input.to_str().unwrap(),
            "--out",
            "p.json"
        ]
    )
    .status
    .success());
    let o = run(
        d.path(),
        &[
            "project",
            "--params",
            "p.json",
            "--initial",
            "50",
            "--days",
            "10",
            "--paths",
            "4",
            "--out",
            "e.csv",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(d.path().join("e.csv")).unwrap();
    assert_eq!(text.lines().count(), 12);
    let row: Vec<f64> = text
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(row, vec![0.0, 50.0, 50.0, 50.0, 50.0]);
}

#[test]
fn experiment_writes_all_artifacts() {
    let d = tempfile::tempdir().unwrap();
    let input = sample_data();
    let o = run(
        d.path(),
        &[
            "experiment",
            "--input",
            input.to_str().unwrap(),
            "--test-start",
            "2020-01-01",
            "--paths",
            "40",
            "--out-dir",
            "run",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["params.json", "historical.csv", "ensemble.csv", "trace.csv"] {
        assert!(d.path().join("run").join(f).exists(), "{f}");
        assert!(
            d.path()
                .join("run")
                .join(format!("{f}.manifest.json"))
                .exists(),
            "{f}"
        );
    }
    let trace = std::fs::read_to_string(d.path().join("run/trace.csv")).unwrap();
    assert_eq!(trace.lines().next().unwrap(), "N,cor_n,cum_mean");
    assert_eq!(trace.lines().count(), 41);
    for line in trace.lines().skip(1) {
        let c: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((-1.0..=1.0).contains(&c));
    }
    assert!(String::from_utf8_lossy(&o.stdout).contains("cor^N="));
}

#[test]
fn correlate_rejects_length_mismatch() {
    let d = tempfile::tempdir().unwrap();
    let input = sample_data();
    assert!(run(
        d.path(),
        &[
            "experiment",
            "--input",
            input.to_str().unwrap(),
            "--test-start",
            "2020-01-01",
            "--paths",
            "5",
            "--out-dir",
            "run"
        ],
    )
    .status
    .success());
    assert!(run(
        d.path(),
        &[
            "project",
            "--gamma",
            "0",
            "--sigma",
            "0.01",
            "--initial",
            "1",
            "--days",
            "3",
            "--paths",
            "2",
            "--out",
            "short.csv"
        ],
    )
    .status
    .success());
    let o = run(
        d.path(),
        &[
            "correlate",
            "--ensemble",
            "short.csv",
            "--historical",
            "run/historical.csv",
            "--out",
            "t.csv",
        ],
    );
    assert_eq!(code(&o), 2);
    assert!(!d.path().join("t.csv").exists());
}
