use proptest::prelude::*;
use qsegsim_core::analysis::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Grid generated from the closed form, with zero noise.
fn exact_grid(p: &ScalingParams, ds: &[usize], eps: &[f64]) -> Vec<GridPoint> {
    let mut out = Vec::new();
    for &d in ds {
        for &e in eps {
            let pl = p.evaluate(e, d as f64);
            out.push(GridPoint {
                eps2: e,
                d,
                p_l: pl,
                stderr: 0.05 * pl,
            });
        }
    }
    out
}

#[test]
fn per_round_rate_recovers_simulated_rate() {
    // Each round flips the logical with probability p; a trial fails on an
    // odd number of flips.
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for &(p, rounds) in &[(0.002, 24usize), (0.01, 8), (0.03, 40)] {
        let trials = 200_000u64;
        let mut fails = 0u64;
        for _ in 0..trials {
            let mut odd = false;
            for _ in 0..rounds {
                odd ^= rng.gen_bool(p);
            }
            fails += odd as u64;
        }
        let r = per_round_rate(fails, trials, rounds).unwrap();
        assert!((r.p_l - p).abs() < 3.0 * r.stderr, "{p} {r:?}");
    }
}

#[test]
fn threshold_of_table_one_surface() {
    let eps: Vec<f64> = (4..=12).map(|k| k as f64 * 1e-3).collect();
    let g = exact_grid(&TABLE_I, &[3, 5, 7], &eps);
    let t = find_threshold(&g, 50, 1).unwrap();
    let exact = (-2.9767f64 / 0.5978).exp();
    assert!((t.eps2_th / exact - 1.0).abs() < 1e-9, "{t:?}");
    assert_eq!(t.crossings.len(), 2);
    assert!(t.stderr > 0.0 && t.stderr < 0.001);
}

#[test]
fn monotone_curves_have_no_threshold() {
    let eps: Vec<f64> = (1..=5).map(|k| k as f64 * 1e-4).collect();
    let g = exact_grid(&TABLE_I, &[3, 5, 7], &eps);
    assert_eq!(find_threshold(&g, 10, 1), Err(AnalysisError::NoThreshold));
    assert_eq!(find_threshold(&g[..5], 10, 1), Err(AnalysisError::NoThreshold));
}

#[test]
fn fit_recovers_exact_parameters() {
    let eps = [1e-3, 1.5e-3, 2e-3, 3e-3, 4e-3];
    let g = exact_grid(&TABLE_I, &[3, 5, 7], &eps);
    let f = fit_scaling(&g).unwrap();
    let got = [f.params.alpha, f.params.beta, f.params.gamma, f.params.delta];
    let want = [0.5978, 2.9767, -3.9819, 0.2923];
    for (a, b) in got.iter().zip(want) {
        assert!((a - b).abs() < 1e-4 * b.abs(), "{got:?}");
    }
    assert!(f.chi2 < 1e-12);
    assert_eq!(f.residuals.len(), 15);
}

#[test]
fn fit_with_noise_stays_within_errors() {
    let eps = [1e-3, 1.5e-3, 2e-3, 2.5e-3, 3e-3, 3.5e-3, 4e-3];
    let mut g = exact_grid(&TABLE_I, &[3, 5, 7, 9], &eps);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for p in &mut g {
        let z: f64 = (0..12).map(|_| rng.gen::<f64>()).sum::<f64>() - 6.0;
        p.p_l *= (0.05 * z).exp();
    }
    let f = fit_scaling(&g).unwrap();
    assert!((f.params.alpha - 0.5978).abs() < 4.0 * f.sigma[0], "{f:?}");
    assert!((f.params.delta - 0.2923).abs() < 4.0 * f.sigma[3], "{f:?}");
    for p in &g {
        let m = f.params.evaluate(p.eps2, p.d as f64);
        assert!((m / p.p_l).ln().abs() < 0.3);
    }
}

#[test]
fn fit_needs_points() {
    let g = exact_grid(&TABLE_I, &[3], &[1e-3, 2e-3, 3e-3, 4e-3, 5e-3, 6e-3]);
    assert!(matches!(fit_scaling(&g), Err(AnalysisError::InsufficientPoints { .. })));
}

#[test]
fn distance_dependence_flips_at_threshold() {
    let th = TABLE_I.threshold();
    for d in 3..30 {
        let below = 0.9 * th;
        let above = 1.1 * th;
        assert!(TABLE_I.evaluate(below, d as f64 + 1.0) < TABLE_I.evaluate(below, d as f64));
        assert!(TABLE_I.evaluate(above, d as f64 + 1.0) > TABLE_I.evaluate(above, d as f64));
    }
}

#[test]
fn segment_anchor_points() {
    let cases = [
        (0.0012, 4e-6, 15),
        (0.00012, 4e-6, 7),
        (0.0011, 1e-15, 35),
        (0.00014, 1e-15, 17),
    ];
    for (eps, target, s) in cases {
        let r = required_segment(&TABLE_I, eps, target).unwrap();
        assert!(r.s.abs_diff(s) <= 2, "{eps} {target}: {r:?}");
        assert!(r.s_odd.abs_diff(s) <= 2, "{eps} {target}: {r:?}");
        assert!(r.p_cnot <= target);
        assert!(TABLE_I.p_cnot(eps, r.d - 1) > target);
    }
    assert!(required_segment(&TABLE_I, 0.007, 1e-6).is_err());
}

#[test]
fn gauge_gates_anchor() {
    let g = gates_before_failure(&TABLE_I, &TABLE_II, 0.001, 21, 4).unwrap();
    assert!(g > 1e15 && g < 1e16, "{g}");
    let g3 = gates_before_failure(&TABLE_I, &TABLE_II, 0.001, 21, 3).unwrap();
    assert!(g3 < g);
}

#[test]
fn gauge_fit_recovers_line() {
    let truth = TABLE_II[2];
    let pts: Vec<(f64, f64, f64)> = [3e-5, 1e-4, 3e-4, 1e-3, 3e-3]
        .iter()
        .map(|&p| {
            let q = truth.evaluate(p);
            (p, q, 0.1 * q)
        })
        .collect();
    let f = fit_gauge_scaling(&pts).unwrap();
    assert!((f.params.kappa - truth.kappa).abs() < 1e-9);
    assert!((f.params.eta - truth.eta).abs() < 1e-8);
    assert!(matches!(
        fit_gauge_scaling(&pts[..2]),
        Err(AnalysisError::InsufficientPoints { need: 3, got: 2 })
    ));
    let x = TABLE_II[1].crossing(&TABLE_II[2]).unwrap();
    assert!((TABLE_II[1].evaluate(x) / TABLE_II[2].evaluate(x) - 1.0).abs() < 1e-9);
}

proptest! {
    #[test]
    fn required_segment_is_monotone(e in 1e-5f64..5e-3, t in -15.0f64..-4.0, f in 1.01f64..3.0) {
        let target = 10f64.powf(t);
        let a = required_segment(&TABLE_I, e, target).unwrap();
        let lower = required_segment(&TABLE_I, e / f, target).unwrap();
        let looser = required_segment(&TABLE_I, e, target * f).unwrap();
        prop_assert!(lower.s <= a.s);
        prop_assert!(looser.s <= a.s);
    }

    #[test]
    fn inversion_round_trips(p in 1e-5f64..0.2, rounds in 1usize..100) {
        let pf = (1.0 - (1.0 - 2.0 * p).powi(rounds as i32)) / 2.0;
        let trials = 1u64 << 40;
        let fails = (pf * trials as f64).round() as u64;
        prop_assume!(fails > 0 && pf < 0.499);
        let r = per_round_rate(fails, trials, rounds).unwrap();
        prop_assert!((r.p_l - p).abs() < 1e-6 * p + 1e-9);
    }
}
