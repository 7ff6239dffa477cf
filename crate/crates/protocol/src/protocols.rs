//! The deformation protocols and their symbolic verification.
//!
//! Segments are numbered left to right and qubit `q` lives on segment
//! `q / d`. Regions are runs of `2d - 1` segments. A standard patch
//! starts and ends on a long column, has rough top and bottom sides and
//! smooth left and right sides; its Z logical runs down one long column and
//! its X logical along row 0 of every long column.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use qsegsim_core::frame::{Basis, CliffordGate};
use qsegsim_core::pauli::{Pauli, PauliOperator};
use qsegsim_core::stabilizer::StabilizerGroup;
use serde::{Deserialize, Serialize};

use crate::distance::{audit_distance, DistanceAudit};
use crate::lattice::{max_segment_span, Column, Frame, Role, Sides};
use crate::step::{apply_step, DeformationStep, ProtocolError, ProtocolState};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub name: String,
    pub segments: RangeInclusive<usize>,
}

/// Image of one logical: the product of the named final logicals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expected {
    pub label: String,
    pub image: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub name: String,
    pub d: usize,
    pub num_qubits: usize,
    pub regions: Vec<Region>,
    pub initial_frame: Frame,
    pub initial_active: BTreeSet<usize>,
    pub initial_logicals: Vec<(String, PauliOperator)>,
    pub steps: Vec<DeformationStep>,
    /// Logical operators on the final lattice, named.
    pub final_logicals: Vec<(String, PauliOperator)>,
    pub expected: Vec<Expected>,
}

/// Deliberately broken variants used as negative controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mutation {
    /// CNOT: leave the target's bottom half edges out of the extension.
    SkipTargetBottom,
    /// CNOT: A3 loses its bottom row as well as its top one.
    ThinA3,
    /// CNOT: keep the top row of A3, so A3 is not shrunk.
    SkipA3Shrink,
    /// CNOT: shrink only the long column of A3 next to the target.
    NarrowA3Shrink,
    /// CNOT: skip the smooth bottom under A2 and A3 but keep the target's.
    SkipAncillaBottom,
    /// Hadamard: keep the top row of the second patch.
    SkipHadamardShrink,
    /// Hadamard: shrink the top of the second patch except its first long
    /// column.
    PartialHadamardShrink,
    /// State transfer: read the vacated patch out in Z instead of X.
    ReadoutInZ,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// From the right patch to the left one.
    RightToLeft,
    LeftToRight,
}

fn q(d: usize, segment: usize, row: usize) -> usize {
    segment * d + row
}

fn parity_role(segment: usize, long_parity: usize) -> Role {
    if segment % 2 == long_parity {
        Role::Long
    } else {
        Role::Short
    }
}

/// Qubits of a block of segments: `long_rows` on long and `short_rows` on
/// short columns, roles by segment parity.
fn block(
    d: usize,
    segments: RangeInclusive<usize>,
    long_parity: usize,
    long_rows: RangeInclusive<usize>,
    short_rows: RangeInclusive<usize>,
) -> Vec<usize> {
    let mut out = Vec::new();
    for s in segments {
        let rows = match parity_role(s, long_parity) {
            Role::Long => long_rows.clone(),
            Role::Short => short_rows.clone(),
        };
        out.extend(rows.map(|r| q(d, s, r)));
    }
    out
}

/// The half-edge row `d - 1` of every short column in `segments`.
fn bottom(d: usize, segments: RangeInclusive<usize>, long_parity: usize) -> Vec<usize> {
    segments
        .filter(|&s| parity_role(s, long_parity) == Role::Short)
        .map(|s| q(d, s, d - 1))
        .collect()
}

fn with(qubits: &[usize], b: Basis) -> Vec<(usize, Basis)> {
    qubits.iter().map(|&q| (q, b)).collect()
}

/// Z down the long column at `segment` and X along row 0 of the long
/// columns `first, first + 2, ..`.
fn standard_logicals(n: usize, d: usize, first: usize, name: &str) -> Vec<(String, PauliOperator)> {
    let z = PauliOperator::uniform(n, (0..d).map(|r| q(d, first, r)), Pauli::Z).expect("in range");
    let x = PauliOperator::uniform(n, (0..d).map(|j| q(d, first + 2 * j, 0)), Pauli::X).expect("in range");
    vec![(format!("Z{name}"), z), (format!("X{name}"), x)]
}

/// Builds a step sequence, keeping track of the active set.
struct Builder {
    active: BTreeSet<usize>,
    steps: Vec<DeformationStep>,
}

impl Builder {
    fn new(active: &BTreeSet<usize>) -> Self {
        Self {
            active: active.clone(),
            steps: Vec::new(),
        }
    }

    fn step(
        &mut self,
        label: &str,
        initialized: Vec<(usize, Basis)>,
        gates: Vec<CliffordGate>,
        measured: Vec<(usize, Basis)>,
        frame: &Frame,
        logical_qubits: usize,
    ) {
        for (q, _) in &initialized {
            self.active.insert(*q);
        }
        for (q, _) in &measured {
            self.active.remove(q);
        }
        self.steps.push(DeformationStep {
            label: label.to_string(),
            initialized,
            gates,
            measured,
            frame: frame.clone(),
            active: self.active.clone(),
            logical_qubits,
        });
    }
}

/// Logical CNOT between a control patch C and a target patch T separated by
/// three ancilla regions A1, A2, A3.
pub fn cnot_protocol(d: usize, mutation: Option<Mutation>) -> Protocol {
    assert!(d >= 2, "distance must be at least 2");
    let w = 2 * d - 1;
    let segs = 5 * w;
    let n = segs * d;
    let r = |i: usize| i * w..=(i + 1) * w - 1;
    let (c, a1, a2, a3, t) = (r(0), r(1), r(2), r(3), r(4));
    let frame = Frame::alternating(d, 0..segs, Role::Long);
    let top = 0..=d - 1;
    let rest = 0..=d - 2;
    let std = |s: RangeInclusive<usize>| block(d, s, 0, top.clone(), rest.clone());

    let mut initial_active: BTreeSet<usize> = std(c.clone()).into_iter().collect();
    initial_active.extend(std(t.clone()));
    let mut initial_logicals = standard_logicals(n, d, *c.start(), "c");
    initial_logicals.extend(standard_logicals(n, d, *t.start(), "t"));

    let mut b = Builder::new(&initial_active);

    // Step 1: extend the target into A3, whose top row is left out.
    let a3_rows = match mutation {
        Some(Mutation::SkipA3Shrink) => 0..=d - 1,
        Some(Mutation::ThinA3) => 1..=d - 2,
        _ => 1..=d - 1,
    };
    let mut a3q = block(d, a3.clone(), 0, a3_rows, rest.clone());
    if mutation == Some(Mutation::NarrowA3Shrink) {
        // Long columns of A3 other than the last keep their top qubit.
        a3q.extend((a3.start() + 1..a3.end() - 1).step_by(2).map(|s| q(d, s, 0)));
    }
    b.step("extend target into A3", with(&a3q, Basis::X), vec![], vec![], &frame, 2);

    // Step 2: prepare A2 and a smooth bottom under A2, A3 and T.
    let mut bottoms = Vec::new();
    if mutation != Some(Mutation::SkipAncillaBottom) {
        bottoms.extend(bottom(d, a2.clone(), 0));
        bottoms.extend(bottom(d, a3.clone(), 0));
    }
    if mutation != Some(Mutation::SkipTargetBottom) {
        bottoms.extend(bottom(d, t.clone(), 0));
    }
    let mut init2 = std(a2.clone());
    init2.extend(&bottoms);
    b.step(
        "merge A2 with A3 and target",
        with(&init2, Basis::Z),
        vec![],
        vec![],
        &frame,
        2,
    );

    // Step 3: join the control through A1 and drop the smooth bottom.
    b.step(
        "merge control through A1",
        with(&std(a1.clone()), Basis::X),
        vec![],
        with(&bottoms, Basis::Z),
        &frame,
        2,
    );

    // Step 4: read out the ancilla regions.
    let mut anc: Vec<usize> = std(a1.clone());
    anc.extend(std(a2.clone()));
    anc.extend(
        block(d, a3.clone(), 0, 0..=d - 1, rest.clone())
            .into_iter()
            .filter(|q| b.active.contains(q)),
    );
    b.step("split ancillas", vec![], vec![], with(&anc, Basis::X), &frame, 2);

    Protocol {
        name: "cnot".into(),
        d,
        num_qubits: n,
        regions: [("C", c), ("A1", a1), ("A2", a2), ("A3", a3), ("T", t)]
            .into_iter()
            .map(|(name, segments)| Region {
                name: name.into(),
                segments,
            })
            .collect(),
        initial_frame: frame,
        initial_active,
        final_logicals: initial_logicals.clone(),
        initial_logicals,
        steps: b.steps,
        expected: vec![
            expected("Zc", &["Zc"]),
            expected("Zt", &["Zc", "Zt"]),
            expected("Xc", &["Xc", "Xt"]),
            expected("Xt", &["Xt"]),
        ],
    }
}

fn expected(label: &str, image: &[&str]) -> Expected {
    Expected {
        label: label.into(),
        image: image.iter().map(|s| s.to_string()).collect(),
    }
}

/// Moves a patch one region to the right while applying a logical
/// Hadamard. The second patch is built rotated and relabelled by a
/// transversal Hadamard at the end.
pub fn hadamard_protocol(d: usize, mutation: Option<Mutation>) -> Protocol {
    assert!(d >= 2, "distance must be at least 2");
    let w = 2 * d - 1;
    let segs = 2 * w;
    let n = segs * d;
    let (p1, p2) = (0..=w - 1, w..=2 * w - 1);
    let last = 2 * w - 1;
    let frame = Frame::alternating(d, 0..segs, Role::Long);
    let full = 0..=d - 1;
    let rest = 0..=d - 2;

    let initial_active: BTreeSet<usize> = block(d, p1.clone(), 0, full.clone(), rest.clone())
        .into_iter()
        .collect();
    let initial_logicals = standard_logicals(n, d, 0, "");
    let mut b = Builder::new(&initial_active);

    // Step 1: widen the patch over the second region but its last column.
    let ext = block(d, w..=last - 1, 0, full.clone(), rest.clone());
    b.step("widen", with(&ext, Basis::X), vec![], vec![], &frame, 1);

    // Step 2: smooth top over the second region, rough right end, smooth
    // bottom everywhere.
    let shrink: Vec<usize> = if mutation == Some(Mutation::SkipHadamardShrink) {
        Vec::new()
    } else {
        let mut s: Vec<usize> = (w + 1..last).step_by(2).map(|x| q(d, x, 0)).collect();
        if mutation == Some(Mutation::PartialHadamardShrink) {
            s.remove(0);
        }
        s
    };
    let mut init = with(&(0..=d - 2).map(|r| q(d, last, r)).collect::<Vec<_>>(), Basis::X);
    init.extend(with(&bottom(d, 0..=last, 0), Basis::Z));
    b.step("rotate boundaries", init, vec![], with(&shrink, Basis::X), &frame, 1);

    // Step 3: read out the first region.
    let gone: Vec<usize> = b.active.iter().copied().filter(|&x| x / d < w).collect();
    b.step("release first region", vec![], vec![], with(&gone, Basis::Z), &frame, 1);

    // Step 4: transversal Hadamard; short columns now carry vertical edges.
    let f2 = Frame {
        d,
        columns: p2
            .clone()
            .map(|s| {
                let long = parity_role(s, 0) == Role::Short;
                Column {
                    segment: s,
                    role: if long { Role::Long } else { Role::Short },
                    row_shift: if long { 0 } else { 1 },
                }
            })
            .collect(),
    };
    let gates = b.active.iter().map(|&x| CliffordGate::Hadamard(x)).collect();
    b.step("transversal hadamard", vec![], gates, vec![], &f2, 1);

    let final_logicals = standard_logicals(n, d, w, "'");
    Protocol {
        name: "hadamard".into(),
        d,
        num_qubits: n,
        regions: vec![
            Region {
                name: "P1".into(),
                segments: p1,
            },
            Region {
                name: "P2".into(),
                segments: p2,
            },
        ],
        initial_frame: frame,
        initial_active,
        initial_logicals,
        steps: b.steps,
        final_logicals,
        expected: vec![expected("Z", &["X'"]), expected("X", &["Z'"])],
    }
}

/// Moves a patch between two neighbouring regions without changing its
/// state. The regions differ in segment parity, so one long column is
/// teleported across the gap between them.
pub fn state_transfer_protocol(d: usize, direction: Direction, mutation: Option<Mutation>) -> Protocol {
    assert!(d >= 2, "distance must be at least 2");
    let w = 2 * d - 1;
    let segs = 2 * w;
    let n = segs * d;
    let (p1, p2) = (0..=w - 1, w..=2 * w - 1);
    let full = 0..=d - 1;
    let rest = 0..=d - 2;
    // Left patch: even segments long; right patch: odd segments long.
    let left = |s: RangeInclusive<usize>| block(d, s, 0, full.clone(), rest.clone());
    let right = |s: RangeInclusive<usize>| block(d, s, 1, full.clone(), rest.clone());
    // The skipped segment is the one next to the gap on the far side.
    let skip_right = Frame::alternating(d, (0..w).chain(w + 1..segs), Role::Long);
    let skip_left = Frame::alternating(d, (0..w - 1).chain(w..segs), Role::Long);
    let (src_seg, dst_seg) = match direction {
        Direction::RightToLeft => (w, w - 1),
        Direction::LeftToRight => (w - 1, w),
    };
    let readout = if mutation == Some(Mutation::ReadoutInZ) {
        Basis::Z
    } else {
        Basis::X
    };

    let (initial_frame, initial_active, initial_logicals, final_logicals, b) = match direction {
        Direction::RightToLeft => {
            let frame = Frame::alternating(d, w..segs, Role::Long);
            let act: BTreeSet<usize> = right(p2.clone()).into_iter().collect();
            let mut b = Builder::new(&act);
            b.step(
                "extend",
                with(&left(0..=w - 2), Basis::X),
                vec![],
                vec![],
                &skip_left,
                1,
            );
            teleport(&mut b, d, src_seg, dst_seg, &skip_right);
            let out: Vec<usize> = b.active.iter().copied().filter(|&x| x / d > w).collect();
            b.step(
                "shrink",
                vec![],
                vec![],
                with(&out, readout),
                &Frame::alternating(d, 0..w, Role::Long),
                1,
            );
            (
                frame,
                act,
                standard_logicals(n, d, w, "2"),
                standard_logicals(n, d, 0, "1"),
                b,
            )
        }
        Direction::LeftToRight => {
            let frame = Frame::alternating(d, 0..w, Role::Long);
            let act: BTreeSet<usize> = left(p1.clone()).into_iter().collect();
            let mut b = Builder::new(&act);
            b.step(
                "extend",
                with(&right(w + 1..=segs - 1), Basis::X),
                vec![],
                vec![],
                &skip_right,
                1,
            );
            teleport(&mut b, d, src_seg, dst_seg, &skip_left);
            let out: Vec<usize> = b.active.iter().copied().filter(|&x| x / d < w - 1).collect();
            b.step(
                "shrink",
                vec![],
                vec![],
                with(&out, readout),
                &Frame::alternating(d, w..segs, Role::Long),
                1,
            );
            (
                frame,
                act,
                standard_logicals(n, d, 0, "1"),
                standard_logicals(n, d, w, "2"),
                b,
            )
        }
    };
    let (from, to) = match direction {
        Direction::RightToLeft => ("2", "1"),
        Direction::LeftToRight => ("1", "2"),
    };
    Protocol {
        name: format!("state transfer {from} to {to}"),
        d,
        num_qubits: n,
        regions: vec![
            Region {
                name: "P1".into(),
                segments: p1,
            },
            Region {
                name: "P2".into(),
                segments: p2,
            },
        ],
        initial_frame,
        initial_active,
        initial_logicals,
        steps: b.steps,
        final_logicals,
        expected: vec![
            expected(&format!("Z{from}"), &[&format!("Z{to}")]),
            expected(&format!("X{from}"), &[&format!("X{to}")]),
        ],
    }
}

/// Moves the long column on segment `src` to the empty segment `dst`: the
/// destination starts in `|0>`, a CNOT per row copies, and an X readout of
/// the source completes the teleportation.
fn teleport(b: &mut Builder, d: usize, src: usize, dst: usize, frame: &Frame) {
    let gates = (0..d)
        .map(|r| CliffordGate::Cnot {
            control: q(d, src, r),
            target: q(d, dst, r),
        })
        .collect();
    let to: Vec<usize> = (0..d).map(|r| q(d, dst, r)).collect();
    let from: Vec<usize> = (0..d).map(|r| q(d, src, r)).collect();
    b.step(
        "teleport column",
        with(&to, Basis::Z),
        gates,
        with(&from, Basis::X),
        frame,
        1,
    );
}

/// Transfer to the other region and back again.
pub fn round_trip_protocol(d: usize) -> Protocol {
    let there = state_transfer_protocol(d, Direction::LeftToRight, None);
    let back = state_transfer_protocol(d, Direction::RightToLeft, None);
    let mut p = there.clone();
    p.name = "state transfer round trip".into();
    p.steps.extend(back.steps);
    p.final_logicals = there.initial_logicals.clone();
    p.expected = vec![expected("Z1", &["Z1"]), expected("X1", &["X1"])];
    p
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub label: String,
    pub active_qubits: usize,
    pub x_stabilizers: usize,
    pub z_stabilizers: usize,
    pub logical_qubits: usize,
    pub random_outcomes: usize,
    pub determined_outcomes: usize,
    pub distance: DistanceAudit,
    pub max_segment_span: usize,
    /// Regions holding at least one active qubit.
    pub blocks: usize,
    pub sides: Vec<(String, Sides)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapEntry {
    pub label: String,
    pub image: Vec<String>,
    /// The tracked operator at the end, sparse.
    pub tracked: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub protocol: String,
    pub d: usize,
    pub steps: Vec<StepReport>,
    pub map: Vec<MapEntry>,
    pub total_blocks: usize,
    pub min_distance: Option<usize>,
}

impl VerificationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serialises")
    }
}

fn sparse(p: &PauliOperator) -> String {
    let t: Vec<String> = p.terms().iter().map(|(q, s)| format!("{}{q}", s.letter())).collect();
    if t.is_empty() {
        "I".into()
    } else {
        t.join(" ")
    }
}

fn step_report(
    p: &Protocol,
    label: &str,
    frame: &Frame,
    active: &BTreeSet<usize>,
    summary: (usize, usize, usize),
) -> Result<StepReport, ProtocolError> {
    let xs = frame.vertices(active);
    let zs = frame.plaquettes(active);
    let distance = audit_distance(active, &xs, &zs)?;
    let mut all = xs.clone();
    all.extend(zs.iter().cloned());
    let sides: Vec<(String, Sides)> = p
        .regions
        .iter()
        .map(|r| (r.name.clone(), frame.sides(active, &r.segments)))
        .collect();
    let blocks = p
        .regions
        .iter()
        .filter(|r| active.iter().any(|&x| r.segments.contains(&(x / p.d))))
        .count();
    Ok(StepReport {
        label: label.into(),
        active_qubits: active.len(),
        x_stabilizers: xs.len(),
        z_stabilizers: zs.len(),
        logical_qubits: summary.0,
        random_outcomes: summary.1,
        determined_outcomes: summary.2,
        distance,
        max_segment_span: max_segment_span(p.d, &all),
        blocks,
        sides,
    })
}

/// Runs every step and checks the logical map. Distances are reported but
/// not enforced; see [`verify`].
pub fn run_protocol(p: &Protocol) -> Result<VerificationReport, ProtocolError> {
    let n = p.num_qubits;
    let init = DeformationStep {
        label: "initial".into(),
        initialized: Vec::new(),
        gates: Vec::new(),
        measured: Vec::new(),
        frame: p.initial_frame.clone(),
        active: p.initial_active.clone(),
        logical_qubits: p.initial_logicals.len() / 2,
    };
    let mut state = ProtocolState::new(n);
    state.active = p.initial_active.clone();
    let mut group = StabilizerGroup::from_generators(n, init.lattice(n)?)?.reduce();
    group.logical_reps = p.initial_logicals.clone();
    group.validate()?;
    let k0 = p.initial_active.len() - group.rank();
    if k0 != init.logical_qubits {
        return Err(ProtocolError::LogicalCount {
            step: init.label,
            expected: init.logical_qubits,
            found: k0,
        });
    }
    state.group = group;
    let mut steps = vec![step_report(p, "initial", &init.frame, &init.active, (k0, 0, 0))?];
    for s in &p.steps {
        let sum = apply_step(&mut state, s)?;
        steps.push(step_report(
            p,
            &s.label,
            &s.frame,
            &s.active,
            (sum.logical_qubits, sum.random_outcomes, sum.determined_outcomes),
        )?);
    }
    state.group.validate()?;

    let finals = &p.final_logicals;
    let mut fin = state.group.clone();
    fin.logical_reps = finals.clone();
    fin.validate()?;
    let mut map = Vec::new();
    for e in &p.expected {
        let tracked = state
            .group
            .logical(&e.label)
            .ok_or_else(|| ProtocolError::MapMismatch {
                label: e.label.clone(),
                got: "missing".into(),
                expected: e.image.join(" "),
            })?
            .clone();
        let mut want = PauliOperator::identity(n);
        for name in &e.image {
            let op =
                finals
                    .iter()
                    .find(|(l, _)| l == name)
                    .map(|x| &x.1)
                    .ok_or_else(|| ProtocolError::MapMismatch {
                        label: e.label.clone(),
                        got: sparse(&tracked),
                        expected: name.clone(),
                    })?;
            want.mul_assign(op)?;
        }
        if !state.group.equivalent(&tracked, &want)? {
            return Err(ProtocolError::MapMismatch {
                label: e.label.clone(),
                got: sparse(&tracked),
                expected: e.image.join(" "),
            });
        }
        map.push(MapEntry {
            label: e.label.clone(),
            image: e.image.clone(),
            tracked: sparse(&tracked),
        });
    }
    // A Clifford map keeps the commutation table of the logicals.
    let before = &p.initial_logicals;
    for (i, (la, a)) in before.iter().enumerate() {
        for (lb, b) in &before[i + 1..] {
            let ta = state.group.logical(la).expect("tracked");
            let tb = state.group.logical(lb).expect("tracked");
            if a.commutes(b)? != ta.commutes(tb)? {
                return Err(ProtocolError::CommutationChanged {
                    a: la.clone(),
                    b: lb.clone(),
                });
            }
        }
    }
    let total_blocks = steps[1..].iter().map(|s| s.blocks).sum();
    let min_distance = steps.iter().filter_map(|s| s.distance.distance).min();
    Ok(VerificationReport {
        protocol: p.name.clone(),
        d: p.d,
        steps,
        map,
        total_blocks,
        min_distance,
    })
}

/// [`run_protocol`] plus the requirement that every lattice along the way
/// has distance at least `d`.
pub fn verify(p: &Protocol) -> Result<VerificationReport, ProtocolError> {
    let r = run_protocol(p)?;
    for s in &r.steps {
        let found = s.distance.distance.unwrap_or(0);
        if found < p.d {
            return Err(ProtocolError::DistanceTooSmall {
                step: s.label.clone(),
                found,
                d: p.d,
            });
        }
    }
    Ok(r)
}

pub fn verify_cnot(d: usize) -> Result<VerificationReport, ProtocolError> {
    verify(&cnot_protocol(d, None))
}

pub fn verify_hadamard(d: usize) -> Result<VerificationReport, ProtocolError> {
    verify(&hadamard_protocol(d, None))
}

/// Both directions and the round trip; returns the right-to-left report.
pub fn verify_state_transfer(d: usize) -> Result<VerificationReport, ProtocolError> {
    verify(&state_transfer_protocol(d, Direction::LeftToRight, None))?;
    verify(&round_trip_protocol(d))?;
    verify(&state_transfer_protocol(d, Direction::RightToLeft, None))
}
