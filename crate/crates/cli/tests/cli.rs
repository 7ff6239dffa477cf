use std::fs;
use std::path::PathBuf;
use std::process::Command;

use qsegsim_cli::analyze::{analyze, AnalyzeConfig};
use qsegsim_cli::gauge_sweep::{self, GaugeConfig, GaugeRow};
use qsegsim_cli::output::{read_csv, with_pool, write_csv, CliError};
use qsegsim_cli::surface::{self, make_row, SurfaceConfig, SurfaceRow};
use qsegsim_core::analysis::{TABLE_I, TABLE_II};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qsegsim-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    let _ = fs::remove_file(&p);
    p
}

fn small_surface(eps2: Vec<f64>) -> SurfaceConfig {
    SurfaceConfig {
        ds: vec![3],
        eps2,
        rounds: Some(3),
        rounds_per_d: 8,
        trials: 400,
        seed: 5,
    }
}

#[test]
fn surface_sweep_is_byte_stable_across_workers() {
    let cfg = small_surface(vec![0.006, 0.009]);
    let a = scratch("stable_a.csv");
    let b = scratch("stable_b.csv");
    with_pool(Some(1), || surface::run(&cfg, &a, |_| {})).unwrap().unwrap();
    with_pool(Some(3), || surface::run(&cfg, &b, |_| {})).unwrap().unwrap();
    let (x, y) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    assert!(text.contains("# config_hash "));
    assert!(text.contains("d,s,eps2,rounds,trials,failures_Z,failures_X,p_L_Z,p_L_X,stderr_Z,stderr_X,point_hash"));
    let rows: Vec<SurfaceRow> = read_csv(&a).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].failures_z > 0);
}

#[test]
fn sweep_resumes_by_point_hash() {
    let out = scratch("resume.csv");
    let first = surface::run(&small_surface(vec![0.006]), &out, |_| {}).unwrap();
    // Tamper with the stored count: a resumed run must keep it, proving the
    // point was skipped rather than recomputed.
    let mut forged = first.clone();
    forged[0] = make_row(3, 0.006, 3, 400, 7, 7, forged[0].point_hash.clone()).unwrap();
    write_csv(&out, &["forged".into()], &forged).unwrap();
    let mut fresh = 0;
    let rows = surface::run(&small_surface(vec![0.006, 0.008]), &out, |_| fresh += 1).unwrap();
    assert_eq!(fresh, 1);
    assert_eq!(rows[0].failures_z, 7);
    // The new point matches a run made from scratch.
    let alone = surface::run(&small_surface(vec![0.008]), &scratch("alone.csv"), |_| {}).unwrap();
    assert_eq!(rows[1], alone[0]);
}

#[test]
fn invalid_configs_are_rejected() {
    let mut c = small_surface(vec![0.006]);
    c.ds = vec![1];
    assert!(matches!(c.validate(), Err(CliError::Config(_))));
    let mut c = small_surface(vec![0.7]);
    assert!(c.validate().is_err());
    c.eps2 = vec![0.001];
    c.trials = 0;
    assert!(c.validate().is_err());
    let g = GaugeConfig {
        levels: 5,
        p_cnot: vec![1e-3],
        trials: 10,
        seed: 0,
        d: 5,
    };
    assert!(g.validate().is_err());
}

#[test]
fn gauge_sweep_rows_and_determinism() {
    let cfg = GaugeConfig {
        levels: 2,
        p_cnot: vec![3e-3, 1e-2],
        trials: 20_000,
        seed: 3,
        d: 5,
    };
    let a = scratch("gauge_a.csv");
    let b = scratch("gauge_b.csv");
    let rows = with_pool(Some(1), || gauge_sweep::run(&cfg, &a, |_| {}))
        .unwrap()
        .unwrap();
    with_pool(Some(2), || gauge_sweep::run(&cfg, &b, |_| {}))
        .unwrap()
        .unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(rows.len(), 4);
    assert_eq!((rows[0].n, rows[3].n), (1, 2));
    assert!(rows[0].p_fail < rows[1].p_fail);
    let back: Vec<GaugeRow> = read_csv(&a).unwrap();
    assert_eq!(back, rows);
    let text = fs::read_to_string(&a).unwrap();
    assert!(text.contains("n,p_CNOT,trials,failures,P_CNOT,stderr,point_hash"));
}

#[test]
fn analysis_recovers_published_laws_from_exact_data() {
    let mut surface = Vec::new();
    for d in [3, 5, 7] {
        for k in 0..=22 {
            let eps2 = 0.001 + 0.0005 * k as f64;
            let p = TABLE_I.evaluate(eps2, d as f64).min(0.2);
            let mut r = make_row(d, eps2, d, 1_000_000, 100, 100, format!("{d}-{k}")).unwrap();
            r.p_l_z = p;
            r.stderr_z = 0.05 * p;
            surface.push(r);
        }
    }
    let mut gauge = Vec::new();
    for (i, law) in TABLE_II.iter().enumerate() {
        for p in [1e-6, 3e-6, 1e-5, 3e-5, 1e-4] {
            let q: f64 = law.evaluate(p);
            gauge.push(GaugeRow {
                n: i + 1,
                p_cnot: p,
                trials: 1_000_000,
                failures: 1000,
                p_fail: q,
                stderr: 0.05 * q,
                point_hash: String::new(),
            });
        }
    }
    let s = scratch("exact_surface.csv");
    let g = scratch("exact_gauge.csv");
    write_csv(&s, &[], &surface).unwrap();
    write_csv(&g, &[], &gauge).unwrap();
    let cfg = AnalyzeConfig {
        surface: vec![s],
        gauge: vec![g],
        gauge_max_p: 1.0,
        threshold_window: (0.001, 0.012),
        ..AnalyzeConfig::default()
    };
    let r = analyze(&cfg).unwrap();
    let th = r.threshold.unwrap().eps2_th;
    assert!((th / TABLE_I.threshold() - 1.0).abs() < 0.02, "{th}");
    let fit = r.scaling.unwrap();
    assert!((fit.fit.params.alpha - TABLE_I.alpha).abs() < 1e-6);
    assert!(fit.max_ratio < 1.0 + 1e-6);
    assert_eq!(r.gauge_levels.len(), 4);
    for l in &r.gauge_levels {
        assert!((l.fit.params.kappa - l.published.kappa).abs() < 1e-9);
    }
    let c = r.crossings.iter().find(|c| c.lower == 2).unwrap();
    assert!((c.p_cnot.unwrap() / c.published.unwrap() - 1.0).abs() < 1e-6);
}

fn qsegsim(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_qsegsim"))
        .args(args)
        .env("QSEGSIM_WORKERS", "1")
        .output()
        .unwrap()
}

#[test]
fn binary_reports_and_exit_codes() {
    let out = qsegsim(&["verify-protocol", "--protocol", "cnot", "--d", "3"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["verified"][0]["min_distance"], 3);

    let out = qsegsim(&["surface-sweep", "--d", "2", "--eps2", "0.001"]);
    assert_eq!(out.status.code(), Some(2));
    let e: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(e["error"], "config");

    let out = qsegsim(&["decode-check", "--graphs", "20"]);
    assert!(out.status.success());

    let bad = scratch("bad.csv");
    fs::write(&bad, "n,p_CNOT\nx,y\n").unwrap();
    let out = qsegsim(&["analyze", "--gauge", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    let a = qsegsim(&["resource-curves"]);
    let b = qsegsim(&["resource-curves"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);

    let out = Command::new(env!("CARGO_BIN_EXE_qsegsim"))
        .args(["decode-check", "--graphs", "1"])
        .env("QSEGSIM_WORKERS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
