use proptest::prelude::*;
use qsegsim_core::frame::Basis;
use qsegsim_gauge::*;

fn pauli_bits(loc: Location) -> u32 {
    match loc {
        Location::Cnot { .. } | Location::Swap => 4,
        Location::Prep(_) | Location::Idle(_) => 2,
        Location::Meas(_) => 1,
    }
}

/// `(logical error, flag)` of an outcome code.
fn split(kind: GadgetKind, out: u8) -> (bool, bool) {
    match kind {
        GadgetKind::Cnot { .. } | GadgetKind::Swap => (out & 15 != 0, out >> 4 != 0),
        GadgetKind::Meas(_) => (out & 1 != 0, out >> 1 != 0),
        _ => (out & 3 != 0, out >> 2 != 0),
    }
}

/// Layers holding the `d1`/`d2` swaps of the error-correction rounds.
fn ec_swap_layers(g: &Gadget) -> Vec<usize> {
    g.rounds.iter().flat_map(|r| [r.x_layer + 1, r.decode_after]).collect()
}

/// Calls `f(location index, location, Pauli code, touches both units)` for
/// every single fault of `m`.
fn each_fault(m: &Model, mut f: impl FnMut(usize, Location, u8, bool)) {
    for (i, &loc) in m.locations.iter().enumerate() {
        let pb = pauli_bits(loc);
        for c in 1u8..1 << pb {
            f(i, loc, c, pb == 4 && c & 3 != 0 && c & 12 != 0);
        }
    }
}

#[test]
fn zero_rates_never_fail() {
    let r = LogicalRates::zero(5);
    let h = build_hierarchy(&r, 3, 2000, 7).unwrap();
    for n in 1..=3 {
        let e = h.estimate(n);
        assert_eq!(e.failures, 0);
        assert_eq!(e.p_fail, 0.0);
    }
    for kind in GadgetKind::ALL {
        let g = Gadget::build(kind);
        assert_eq!(run_gadget(&g, &mut Injector::new(usize::MAX, 0)), 0, "{kind:?}");
    }
}

#[test]
fn single_unit_faults_are_always_detected() {
    // Level 1 has no flags to lean on: it can only detect.
    for kind in GadgetKind::ALL {
        let m = Model::new(&Gadget::build(kind));
        each_fault(&m, |i, _, c, pair| {
            if pair {
                return;
            }
            let (fail, flag) = split(kind, m.run(&mut Injector::new(i, c)));
            assert!(!fail || flag, "{kind:?} location {i} code {c:#b}");
        });
    }
}

#[test]
fn correlated_swap_fault_inside_a_block_is_invisible() {
    let g = Gadget::build(GadgetKind::Idle);
    let m = Model::new(&g);
    let swaps = ec_swap_layers(&g);
    let mut found = false;
    each_fault(&m, |i, loc, c, pair| {
        if pair && loc == Location::Swap && swaps.contains(&m.layers[i]) {
            let (fail, flag) = split(g.kind, m.run(&mut Injector::new(i, c)));
            found |= fail && !flag;
        }
    });
    assert!(found);
}

/// Code with the flag bits of every unit the Pauli part touches.
fn flagged(loc: Location, c: u8) -> u8 {
    let pb = pauli_bits(loc);
    let f = if pb == 4 {
        (c & 3 != 0) as u8 | ((c & 12 != 0) as u8) << 1
    } else {
        1
    };
    c | f << pb
}

#[test]
fn flagged_single_unit_faults_are_corrected() {
    for kind in GadgetKind::ALL {
        let m = Model::new(&Gadget::build(kind));
        each_fault(&m, |i, loc, c, pair| {
            if !pair {
                let (fail, _) = split(kind, m.run(&mut Injector::new(i, flagged(loc, c))));
                assert!(!fail, "{kind:?} location {i} code {c:#b}");
            }
        });
    }
}

#[test]
fn only_same_block_swaps_defeat_the_corrector() {
    for kind in GadgetKind::ALL {
        let g = Gadget::build(kind);
        let m = Model::new(&g);
        let swaps = ec_swap_layers(&g);
        let mut failures = 0;
        each_fault(&m, |i, loc, c, _| {
            let (fail, flag) = split(kind, m.run(&mut Injector::new(i, flagged(loc, c))));
            if fail {
                failures += 1;
                assert!(flag, "{kind:?} location {i}");
                assert!(
                    loc == Location::Swap && swaps.contains(&m.layers[i]),
                    "{kind:?} {loc:?}"
                );
            }
        });
        let expect_some = !matches!(kind, GadgetKind::Meas(_));
        assert_eq!(failures > 0, expect_some, "{kind:?}");
    }
}

#[test]
fn failure_rate_grows_with_noise() {
    let mut last = [0.0; 2];
    for p in [3e-5, 3e-4, 3e-3] {
        let r = LogicalRates::from_p_cnot(p, 5).unwrap();
        let h = build_hierarchy(&r, 2, 20_000, 3).unwrap();
        for n in 1..=2 {
            let e = h.estimate(n);
            assert!(e.p_fail > last[n - 1], "n={n} p={p}");
            last[n - 1] = e.p_fail;
        }
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let r = LogicalRates::from_p_cnot(1e-3, 5).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| build_hierarchy(&r, 2, 40_000, 11).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn flattened_circuit_is_nearest_neighbour() {
    for n in 1..=2 {
        let c = build_gauge_circuit(n).unwrap();
        let width = c.num_qubits();
        assert_eq!(width, 2 * 6usize.pow(n as u32));
        let ops = c.ops();
        let mut tally = OpCounts::default();
        for op in &ops {
            match *op {
                Op::Prep { q, .. } | Op::Meas { q, .. } => assert!(q < width),
                Op::Cnot { control: a, target: b } | Op::Swap { a, b } => {
                    assert!(a < width && b < width);
                    assert_eq!(a.abs_diff(b), 1, "{op:?}");
                }
            }
            match op {
                Op::Prep { .. } => tally.prep += 1,
                Op::Meas { .. } => tally.meas += 1,
                Op::Cnot { .. } => tally.cnot += 1,
                Op::Swap { .. } => tally.swap += 1,
            }
        }
        assert_eq!(tally, c.counts());
    }
    assert!(build_gauge_circuit(0).is_err());
    assert!(build_gauge_circuit(5).is_err());
}

#[test]
fn config_sizes() {
    for n in 1..=4 {
        let c = GaugeConfig::new(n).unwrap();
        assert_eq!(c.distance(), 1 << n);
        assert_eq!(c.block_size(), 6usize.pow(n as u32));
        assert_eq!(c.surface_patches(), 4 * 6usize.pow(n as u32));
    }
    assert!(GaugeConfig::new(0).is_err());
}

#[test]
fn prep_and_meas_use_both_bases() {
    for b in [Basis::Z, Basis::X] {
        let g = Gadget::build(GadgetKind::Prep(b));
        assert!(g.ops().any(|o| matches!(o, Op::Prep { basis, .. } if *basis == b)));
        assert!(g.rounds[0].reference.is_some_and(|r| r != b));
    }
}

proptest! {
    #[test]
    fn rates_follow_surface_code_costs(p_l in 1e-12f64..1e-4, d in 3usize..25) {
        let r = LogicalRates::new(p_l, d).unwrap();
        let df = d as f64;
        prop_assert!((r.p_im - df * p_l).abs() <= 1e-15);
        prop_assert!((r.p_cnot - 14.0 * df * p_l).abs() <= 1e-15 * r.p_cnot.max(1.0));
        prop_assert!((r.p_swap - 3.0 * r.p_cnot).abs() <= 1e-15);
        prop_assert!((r.memory_cnot() - 4.0 * r.p0).abs() <= 1e-15);
        prop_assert!((r.memory_swap() - 12.0 * r.p0).abs() <= 1e-15);
        let back = LogicalRates::from_p_cnot(r.p_cnot, d).unwrap();
        prop_assert!((back.p_l - p_l).abs() <= 1e-12 * p_l);
    }

    #[test]
    fn dist_samples_only_observed_codes(counts in proptest::collection::vec(0u64..5, 8), seed in any::<u64>()) {
        let d = Dist::from_counts(counts.clone());
        let mut rng = qsegsim_core::sim::trial_rng(seed, 0);
        for _ in 0..200 {
            let c = d.sample(&mut rng) as usize;
            prop_assert!(c == 0 || counts[c] > 0);
        }
    }

    #[test]
    fn flagged_fault_never_slips_through(kind_i in 0usize..8, loc_frac in 0.0f64..1.0, code in 1u8..16) {
        let kind = GadgetKind::ALL[kind_i];
        let m = Model::new(&Gadget::build(kind));
        let i = ((loc_frac * m.locations.len() as f64) as usize).min(m.locations.len() - 1);
        let loc = m.locations[i];
        let c = code & ((1 << pauli_bits(loc)) - 1);
        prop_assume!(c != 0);
        let (fail, flag) = split(kind, m.run(&mut Injector::new(i, flagged(loc, c))));
        prop_assert!(!fail || flag);
    }
}
