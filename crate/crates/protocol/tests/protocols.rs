use std::collections::BTreeSet;

use proptest::prelude::*;
use qsegsim_core::frame::Basis;
use qsegsim_core::pauli::{Pauli, PauliOperator};
use qsegsim_core::stabilizer::StabilizerGroup;
use qsegsim_protocol::*;

/// Lightest nontrivial logical by enumerating every subset of active qubits
/// of one Pauli type, weight by weight.
fn brute_force_distance(n: usize, active: &BTreeSet<usize>, xs: &[Vec<usize>], zs: &[Vec<usize>]) -> Option<usize> {
    let mut gens = Vec::new();
    for s in xs {
        gens.push(PauliOperator::uniform(n, s.iter().copied(), Pauli::X).unwrap());
    }
    for s in zs {
        gens.push(PauliOperator::uniform(n, s.iter().copied(), Pauli::Z).unwrap());
    }
    let group = StabilizerGroup::from_generators(n, gens.clone()).unwrap();
    if group.rank() == active.len() {
        return None;
    }
    let qs: Vec<usize> = active.iter().copied().collect();
    for w in 1..=qs.len() {
        let mut idx: Vec<usize> = (0..w).collect();
        loop {
            for p in [Pauli::X, Pauli::Z] {
                let op = PauliOperator::uniform(n, idx.iter().map(|&i| qs[i]), p).unwrap();
                if gens.iter().all(|g| g.commutes(&op).unwrap()) && !group.contains(&op).unwrap() {
                    return Some(w);
                }
            }
            // Next combination in lexicographic order.
            let mut i = w;
            while i > 0 && idx[i - 1] == qs.len() - w + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            idx[i - 1] += 1;
            for j in i..w {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    None
}

fn lattices(p: &Protocol) -> Vec<(String, Frame, BTreeSet<usize>)> {
    let mut out = vec![("initial".to_string(), p.initial_frame.clone(), p.initial_active.clone())];
    out.extend(
        p.steps
            .iter()
            .map(|s| (s.label.clone(), s.frame.clone(), s.active.clone())),
    );
    out
}

#[test]
fn cnot_map_verifies() {
    for d in 2..=5 {
        let r = verify_cnot(d).unwrap();
        assert_eq!(r.map.len(), 4);
        assert_eq!(r.total_blocks, 14);
        assert_eq!(
            r.steps.iter().map(|s| s.blocks).collect::<Vec<_>>(),
            vec![2, 3, 4, 5, 2]
        );
        for s in &r.steps {
            assert_eq!(s.logical_qubits, 2, "{}", s.label);
            assert!(s.distance.distance.unwrap() >= d);
            assert!(s.max_segment_span <= 3);
        }
        assert_eq!(r.min_distance, Some(d));
    }
}

#[test]
fn hadamard_map_verifies() {
    for d in 2..=5 {
        let r = verify_hadamard(d).unwrap();
        assert_eq!(r.map[0].image, vec!["X'"]);
        assert_eq!(r.map[1].image, vec!["Z'"]);
        for s in &r.steps {
            assert!(s.distance.distance.unwrap() >= d);
            assert!(s.max_segment_span <= 3);
        }
    }
}

#[test]
fn state_transfer_verifies_both_ways() {
    for d in 2..=5 {
        for dir in [Direction::RightToLeft, Direction::LeftToRight] {
            let r = verify(&state_transfer_protocol(d, dir, None)).unwrap();
            assert_eq!(r.steps.len(), 4);
            // The teleported column leaves a one-segment gap while it is
            // in flight.
            assert!(r.steps.iter().all(|s| s.max_segment_span <= 4));
        }
        verify_state_transfer(d).unwrap();
    }
}

#[test]
fn round_trip_is_identity_on_original_supports() {
    for d in 2..=4 {
        let p = round_trip_protocol(d);
        let r = verify(&p).unwrap();
        assert_eq!(r.map[0].image, vec!["Z1"]);
        assert_eq!(r.map[1].image, vec!["X1"]);
        let last = p.steps.last().unwrap();
        assert_eq!(last.active, p.initial_active);
    }
}

#[test]
fn distance_audit_matches_brute_force() {
    for d in [2, 3] {
        for p in [
            cnot_protocol(d, None),
            hadamard_protocol(d, None),
            round_trip_protocol(d),
        ] {
            for (label, frame, active) in lattices(&p) {
                let xs = frame.vertices(&active);
                let zs = frame.plaquettes(&active);
                let audit = audit_distance(&active, &xs, &zs).unwrap();
                let brute = brute_force_distance(p.num_qubits, &active, &xs, &zs);
                assert_eq!(audit.distance, brute, "{} d={d} {label}", p.name);
            }
        }
    }
}

#[test]
fn corrupted_step_has_small_distance() {
    let p = cnot_protocol(5, Some(Mutation::NarrowA3Shrink));
    let frame = &p.steps[0].frame;
    let active = &p.steps[0].active;
    let xs = frame.vertices(active);
    let zs = frame.plaquettes(active);
    let audit = audit_distance(active, &xs, &zs).unwrap();
    assert_eq!(audit.distance, Some(4));
    assert_eq!(brute_force_distance(p.num_qubits, active, &xs, &zs), Some(4));
}

#[test]
fn mutations_are_rejected() {
    for d in 2..=5 {
        for m in [
            Mutation::SkipTargetBottom,
            Mutation::ThinA3,
            Mutation::SkipA3Shrink,
            Mutation::SkipAncillaBottom,
        ] {
            assert!(verify(&cnot_protocol(d, Some(m))).is_err(), "{m:?} d={d}");
        }
        for m in [Mutation::SkipHadamardShrink, Mutation::PartialHadamardShrink] {
            assert!(verify(&hadamard_protocol(d, Some(m))).is_err(), "{m:?} d={d}");
        }
        let t = state_transfer_protocol(d, Direction::RightToLeft, Some(Mutation::ReadoutInZ));
        assert!(matches!(verify(&t), Err(ProtocolError::LogicalMeasured { .. })));
    }
    // The narrow shrink keeps the map but not the distance.
    let narrow = cnot_protocol(5, Some(Mutation::NarrowA3Shrink));
    assert!(run_protocol(&narrow).is_ok());
    assert!(matches!(
        verify(&narrow),
        Err(ProtocolError::DistanceTooSmall { found: 4, d: 5, .. })
    ));
}

#[test]
fn cnot_boundaries_follow_the_deformation() {
    let d = 3;
    let r = verify_cnot(d).unwrap();
    let side = |step: usize, region: &str| r.steps[step].sides.iter().find(|(n, _)| n == region).unwrap().1;
    let a3 = side(1, "A3");
    assert_eq!((a3.top, a3.left, a3.right), (Side::Smooth, Side::Rough, Side::Joined));
    assert_eq!(side(2, "T").bottom, Side::Smooth);
    assert_eq!(side(2, "A2").top, Side::Rough);
    assert_eq!(side(3, "T").bottom, Side::Rough);
    assert_eq!(side(3, "C").right, Side::Joined);
    let c = side(4, "C");
    assert_eq!(
        (c.top, c.bottom, c.left, c.right),
        (Side::Rough, Side::Rough, Side::Smooth, Side::Smooth)
    );
    assert_eq!(side(4, "A2"), Sides::absent());
}

/// Preparing A3 drags the target's X logical into it when the logical is
/// represented on the bottom row.
#[test]
fn target_x_extends_into_a3() {
    let d = 3;
    let p = cnot_protocol(d, None);
    let n = p.num_qubits;
    let t0 = 8 * d - 4;
    let bottom_x = PauliOperator::uniform(n, (0..d).map(|j| (t0 + 2 * j) * d + d - 1), Pauli::X).unwrap();
    let mut state = ProtocolState::new(n);
    state.active = p.initial_active.clone();
    let init = DeformationStep {
        label: "initial".into(),
        initialized: vec![],
        gates: vec![],
        measured: vec![],
        frame: p.initial_frame.clone(),
        active: p.initial_active.clone(),
        logical_qubits: 2,
    };
    state.group = StabilizerGroup::from_generators(n, init.lattice(n).unwrap()).unwrap();
    let row0 = p.initial_logicals.iter().find(|(l, _)| l == "Xt").unwrap().1.clone();
    assert!(state.group.equivalent(&row0, &bottom_x).unwrap());
    state.group.logical_reps = vec![("Xt".into(), bottom_x.clone())];
    apply_step(&mut state, &p.steps[0]).unwrap();
    let xt = state.group.logical("Xt").unwrap();
    let a3 = 6 * d - 3..=8 * d - 5;
    assert!(xt.support().iter().any(|q| a3.contains(&(q / d))), "{xt}");
    assert_ne!(xt, &bottom_x);
    state.group.validate().unwrap();
    // Still the same logical as the row-0 string, which ends where the
    // smooth top of A3 begins.
    assert!(state.group.equivalent(xt, &row0).unwrap());
}

/// Widening a patch with `|+>` qubits and reading them back out in X
/// returns the original group; the Z logical, which never touches them,
/// is unchanged.
#[test]
fn prepare_then_measure_is_identity() {
    let d = 3;
    let p = hadamard_protocol(d, None);
    let n = p.num_qubits;
    let mut state = ProtocolState::new(n);
    state.active = p.initial_active.clone();
    let init = DeformationStep {
        label: "initial".into(),
        initialized: vec![],
        gates: vec![],
        measured: vec![],
        frame: p.initial_frame.clone(),
        active: p.initial_active.clone(),
        logical_qubits: 1,
    };
    state.group = StabilizerGroup::from_generators(n, init.lattice(n).unwrap())
        .unwrap()
        .reduce();
    state.group.logical_reps = p.initial_logicals.clone();
    let before = state.group.clone();
    let widen = p.steps[0].clone();
    apply_step(&mut state, &widen).unwrap();
    let undo = DeformationStep {
        label: "undo".into(),
        initialized: vec![],
        gates: vec![],
        measured: widen.initialized.iter().map(|&(q, _)| (q, Basis::X)).collect(),
        frame: p.initial_frame.clone(),
        active: p.initial_active.clone(),
        logical_qubits: 1,
    };
    apply_step(&mut state, &undo).unwrap();
    assert_eq!(state.group.generators, before.generators);
    assert_eq!(state.group.logical("Z"), before.logical("Z"));
    assert!(state
        .group
        .equivalent(state.group.logical("X").unwrap(), before.logical("X").unwrap())
        .unwrap());
}

#[test]
fn step_errors() {
    let p = cnot_protocol(2, None);
    let mut bad = p.clone();
    let q = bad.steps[0].initialized[0].0;
    bad.steps[0].measured.push((q, Basis::X));
    assert!(matches!(
        run_protocol(&bad),
        Err(ProtocolError::PrepareAndMeasure { .. })
    ));
    let mut count = p.clone();
    count.steps[1].logical_qubits = 3;
    assert!(matches!(
        run_protocol(&count),
        Err(ProtocolError::LogicalCount { found: 2, .. })
    ));
    let mut map = p.clone();
    map.expected[1].image = vec!["Zt".into()];
    assert!(matches!(run_protocol(&map), Err(ProtocolError::MapMismatch { .. })));
}

#[test]
fn report_serialises() {
    let r = verify_cnot(3).unwrap();
    let j = r.to_json();
    assert_eq!(j["steps"].as_array().unwrap().len(), 5);
    let back: VerificationReport = serde_json::from_value(j).unwrap();
    assert_eq!(back, r);
}

/// Standard patch with `m` long columns and `d` rows.
fn patch(d: usize, m: usize) -> (BTreeSet<usize>, Frame) {
    let f = Frame::alternating(d, 0..2 * m - 1, Role::Long);
    let mut act = BTreeSet::new();
    for (a, c) in f.columns.iter().enumerate() {
        let rows = if c.role == Role::Long { d } else { d - 1 };
        for r in 0..rows {
            act.insert(f.qubit(a, r));
        }
    }
    (act, f)
}

#[test]
fn static_patch_distance() {
    let (act, f) = patch(3, 3);
    let a = audit_distance(&act, &f.vertices(&act), &f.plaquettes(&act)).unwrap();
    assert_eq!(a.distance, Some(3));
}

proptest! {
    #[test]
    fn rectangle_distances(d in 2usize..7, m in 1usize..7) {
        let (act, f) = patch(d, m);
        let a = audit_distance(&act, &f.vertices(&act), &f.plaquettes(&act)).unwrap();
        prop_assert_eq!(a.logical_qubits, 1);
        prop_assert_eq!(a.x_distance, Some(m));
        prop_assert_eq!(a.z_distance, Some(d));
    }
}
