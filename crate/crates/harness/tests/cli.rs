use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rud_core::objectives::make_random_spd;
use rud_core::spectral::RegionPredicate;
use rud_core::{Method, ScheduleKind};
use rud_harness::commands::{self, QuadbenchConfig, RegionConfig, TrajectoryConfig};
use rud_harness::output::{read_meta, Status};

fn rudbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rudbench"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let header = reader.headers().unwrap().iter().map(String::from).collect();
    let body = reader
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, body)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn meta_value(csv: &Path, key: &str) -> Option<String> {
    read_meta(&csv.with_extension("meta"))
        .unwrap()
        .into_iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v)
}

fn traj(dir: &Path, method: Method, alpha: f64, mu: f64, theta1: Vec<f64>, iters: usize) -> (PathBuf, Status) {
    let out = dir.join("traj.csv");
    let outcome = commands::trajectory(&TrajectoryConfig {
        method,
        schedule: ScheduleKind::Constant,
        alpha,
        mu,
        theta1,
        iters,
        out: out.clone(),
    })
    .unwrap();
    (out, outcome.status)
}

#[test]
fn region_three_by_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    commands::region(&RegionConfig {
        predicate: RegionPredicate::RudConverges,
        mu_resolution: 3,
        alpha_resolution: 3,
        out: out.clone(),
    })
    .unwrap();
    let (header, body) = rows(&out);
    assert_eq!(header, ["mu", "alpha", "shaded"]);
    assert_eq!(body.len(), 9);
    let mus: Vec<f64> = body.iter().map(|r| num(&r[0])).collect();
    assert!(mus.windows(2).all(|w| w[0] <= w[1]), "rows are mu-major");
    let cell = body
        .iter()
        .find(|r| num(&r[0]) == 1.0 && (num(&r[1]) - 0.005).abs() < 1e-15)
        .unwrap();
    assert_eq!(cell[2], "1");
    assert_eq!(meta_value(&out, "predicate").as_deref(), Some("RUD_CONVERGES"));
}

#[test]
fn region_full_grid_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let outcome = commands::region(&RegionConfig {
        predicate: RegionPredicate::MomBeatsNag,
        mu_resolution: 200,
        alpha_resolution: 200,
        out: out.clone(),
    })
    .unwrap();
    assert_eq!(outcome.rows, 40000);
    assert_eq!(rows(&out).1.len(), 40000);
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let out = out.to_str().unwrap();
    let res = rudbench(&["region", "--resolution", "1", "--out", out]);
    assert_eq!(res.status.code(), Some(2));

    let data = dir.path().join("d.idx");
    commands::synth_digits(10, 1, &data).unwrap();
    let data = data.to_str().unwrap();
    let res = rudbench(&["autoencoder", "--data", data, "--epochs", "0", "--out", out]);
    assert_eq!(res.status.code(), Some(2));
    let res = rudbench(&["autoencoder", "--data", data, "--layers", "100-10-100", "--out", out]);
    assert_eq!(res.status.code(), Some(2));
    let res = rudbench(&["region", "--predicate", "NOPE", "--out", out]);
    assert_eq!(res.status.code(), Some(2));
    let res = rudbench(&["quadbench", "--method", "adam", "--out", out]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn malformed_idx_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.idx");
    fs::write(&data, [0u8, 0, 8, 1, 0, 0]).unwrap();
    let out = dir.path().join("x.csv");
    let res = rudbench(&["autoencoder", "--data", data.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("magic"));
}

#[test]
fn rud_trajectory_example() {
    let dir = tempfile::tempdir().unwrap();
    let (out, status) = traj(dir.path(), Method::Rud, 0.2, 0.9, vec![1.0], 3);
    assert_eq!(status, Status::MaxIters);
    let (header, body) = rows(&out);
    assert_eq!(header, ["t", "theta", "v", "J", "closed_form_theta"]);
    let theta: Vec<f64> = body.iter().map(|r| num(&r[1])).collect();
    for (got, want) in theta.iter().zip([1.0, 0.8, 0.5]) {
        assert!((got - want).abs() < 1e-15, "{got} vs {want}");
    }
    for r in &body {
        assert!((num(&r[1]) - num(&r[4])).abs() < 1e-15);
        assert!((num(&r[3]) - 0.5 * num(&r[1]).powi(2)).abs() < 1e-16);
    }
}

#[test]
fn gd_from_the_optimum_stays_there() {
    let dir = tempfile::tempdir().unwrap();
    let (out, status) = traj(dir.path(), Method::Gd, 0.7, 0.0, vec![0.0], 20);
    assert_eq!(status, Status::Converged);
    for r in rows(&out).1 {
        assert_eq!(num(&r[1]), 0.0);
        assert_eq!(num(&r[3]), 0.0);
    }
}

#[test]
fn divergent_trajectory_leaves_partial_file() {
    let dir = tempfile::tempdir().unwrap();
    let (out, status) = traj(dir.path(), Method::Rud, 0.9, 0.2, vec![1.0], 500);
    assert_eq!(status, Status::Diverged);
    let body = rows(&out).1;
    assert!(!body.is_empty() && body.len() < 500);
    assert_eq!(meta_value(&out, "status").as_deref(), Some("diverged"));
    assert_eq!(meta_value(&out, "status.rud").as_deref(), Some("diverged"));
}

#[test]
fn vector_trajectory_has_indexed_columns() {
    let dir = tempfile::tempdir().unwrap();
    let (out, _) = traj(dir.path(), Method::Nag, 0.1, 0.8, vec![1.0, -2.0, 0.5], 10);
    let (header, body) = rows(&out);
    assert_eq!(header, ["t", "theta_0", "theta_1", "theta_2", "v_0", "v_1", "v_2", "J"]);
    assert_eq!(body.len(), 10);
}

#[test]
fn one_dimensional_quadbench_matches_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let seed = 4;
    let out = dir.path().join("q.csv");
    let cfg = QuadbenchConfig {
        dim: 1,
        seed,
        iters: 40,
        schedule: ScheduleKind::Constant,
        mu: 0.8,
        methods: vec![Method::Mom, Method::Rud],
        eig_low: 1.0,
        eig_high: 1.0,
        out: out.clone(),
        ..QuadbenchConfig::default()
    };
    commands::quadbench(&cfg).unwrap();
    let b = make_random_spd::<f64>(1, seed, 1.0, 1.0).unwrap().rhs()[0];
    let theta1 = commands::quadbench_start(1, seed)[0];
    let quad = rows(&out).1;
    for method in [Method::Mom, Method::Rud] {
        let (tp, _) = traj(dir.path(), method, cfg.alpha, cfg.mu, vec![theta1 - b], cfg.iters);
        let scalar = rows(&tp).1;
        let mine: Vec<&Vec<String>> = quad.iter().filter(|r| r[1] == method.name()).collect();
        assert_eq!(mine.len(), scalar.len());
        for (q, s) in mine.iter().zip(&scalar) {
            assert_eq!(q[0], s[0]);
            assert!((num(&q[3]) - b - num(&s[1])).abs() < 1e-14, "{q:?} vs {s:?}");
            // J - J* = (theta - b)^2 / 2 here; compare on the theta scale
            let dist = (2.0 * num(&q[2]).exp()).sqrt();
            assert!((dist - num(&s[1]).abs()).abs() < 1e-14, "{q:?} vs {s:?}");
            assert_eq!(q[4], "");
        }
    }
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("digits.idx");
    let data_s = data.to_str().unwrap().to_string();
    let cases: Vec<Vec<&str>> = vec![
        vec!["region", "--predicate", "RUD_BEATS_NAG", "--resolution", "40"],
        vec!["trajectory", "--method", "nag-original", "--theta1", "0.3,-1.2", "--iters", "50"],
        vec!["quadbench", "--dim", "60", "--iters", "80", "--method", "gd,nag,rud,nag-two-stage"],
        vec![
            "autoencoder", "--data", &data_s, "--layers", "784-16-4-16-784", "--images", "120",
            "--batch-size", "40", "--epochs", "2", "--method", "gd,rud",
        ],
    ];
    let synth = rudbench(&["synth-digits", "--count", "150", "--seed", "3", "--out", &data_s]);
    assert!(synth.status.success());
    let first = fs::read(&data).unwrap();
    rudbench(&["synth-digits", "--count", "150", "--seed", "3", "--out", &data_s]);
    assert_eq!(first, fs::read(&data).unwrap());

    for (i, case) in cases.iter().enumerate() {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("case{i}_{run}.csv"));
            let mut args = case.clone();
            let out_s = out.to_str().unwrap().to_string();
            args.extend(["--out", &out_s]);
            let res = rudbench(&args);
            assert!(res.status.success(), "{case:?}: {}", String::from_utf8_lossy(&res.stderr));
            assert!(out.with_extension("meta").exists());
            outputs.push(fs::read(&out).unwrap());
        }
        assert!(!outputs[0].is_empty());
        assert_eq!(outputs[0], outputs[1], "{case:?}");
    }
}

#[test]
fn selfcheck_passes_from_the_binary() {
    let res = rudbench(&["selfcheck"]);
    assert!(res.status.success());
    let text = String::from_utf8_lossy(&res.stdout);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 6);
}
