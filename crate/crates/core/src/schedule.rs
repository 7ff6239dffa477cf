//! Time-ordered stabiliser-measurement schedules.
//!
//! Each row of stabilisers takes five steps: shuttle initialisation, the
//! step-i entangling gate, two rounds of shuttle-data CNOTs (steps ii and
//! iii, with the shuttles moving between neighbouring segments) and the
//! shuttle readout.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::Basis;
use crate::layout::ChainLayout;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabKind {
    X,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpKind {
    Init,
    Measure,
    Cnot,
    Hadamard,
    Idle,
    ShuttleMove,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepOp {
    pub kind: OpKind,
    /// `[control, target]` for CNOTs, a single qubit otherwise.
    pub qubits: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub basis: Option<Basis>,
    /// Segment the operation runs in (destination for moves).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl StepOp {
    fn new(kind: OpKind, qubits: Vec<usize>, basis: Option<Basis>, column: Option<usize>) -> Self {
        Self {
            kind,
            qubits,
            basis,
            column,
        }
    }

    pub fn idle(q: usize) -> Self {
        Self::new(OpKind::Idle, vec![q], None, None)
    }

    pub fn hadamard(q: usize) -> Self {
        Self::new(OpKind::Hadamard, vec![q], None, None)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub ops: Vec<StepOp>,
}

/// Where a stabiliser sits on the lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StabLabel {
    pub patch: usize,
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerInfo {
    pub id: usize,
    pub kind: StabKind,
    pub label: StabLabel,
    pub data_qubits: Vec<usize>,
    pub shuttles: Vec<usize>,
    pub measure_step: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShuttlePlan {
    pub qubit: usize,
    /// Segment where the shuttle sits for initialisation and step i.
    pub home: usize,
    pub step_ii: Option<usize>,
    pub step_iii: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepI {
    /// CNOT from the first (|+>) shuttle onto the second (|0>) one.
    ShuttlePair,
    /// Single shuttle; step i couples it to this data qubit instead.
    Data(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementPlan {
    pub kind: StabKind,
    pub label: StabLabel,
    pub shuttles: Vec<ShuttlePlan>,
    pub step_i: StepI,
}

impl MeasurementPlan {
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self
            .shuttles
            .iter()
            .flat_map(|p| p.step_ii.into_iter().chain(p.step_iii))
            .collect();
        if let StepI::Data(q) = self.step_i {
            s.push(q);
        }
        s.sort_unstable();
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundSchedule {
    pub num_qubits: usize,
    pub steps: Vec<Step>,
    pub step_count: usize,
    pub stabilizers: Vec<StabilizerInfo>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("step {step}: two CNOTs in segment {column}")]
    SegmentConflict { step: usize, column: usize },
    #[error("step {step}: shuttle {qubit} acts outside its neighbouring segments")]
    ShuttleOutOfReach { step: usize, qubit: usize },
    #[error("step {step}: shuttle {qubit} jumps from segment {from} to {to}")]
    NonAdjacentMove {
        step: usize,
        qubit: usize,
        from: usize,
        to: usize,
    },
    #[error("step {step}: qubit {qubit} used twice")]
    QubitReused { step: usize, qubit: usize },
    #[error("plan with {0} shuttles is malformed")]
    BadPlan(usize),
}

impl RoundSchedule {
    pub fn x_stabilizers(&self) -> impl Iterator<Item = &StabilizerInfo> {
        self.stabilizers.iter().filter(|s| s.kind == StabKind::X)
    }

    pub fn z_stabilizers(&self) -> impl Iterator<Item = &StabilizerInfo> {
        self.stabilizers.iter().filter(|s| s.kind == StabKind::Z)
    }

    pub fn cnot_count(&self) -> usize {
        self.steps
            .iter()
            .flat_map(|s| &s.ops)
            .filter(|o| o.kind == OpKind::Cnot)
            .count()
    }

    /// Checks the hardware constraints: one CNOT per segment per step, no
    /// qubit used twice in a step, and shuttles only ever reach the two
    /// segments they border.
    pub fn check(&self, layout: &ChainLayout) -> Result<(), ScheduleError> {
        let mut reach = vec![None; layout.num_qubits];
        for g in -1..layout.num_columns() as isize {
            reach[layout.shuttle(g)] = Some(layout.shuttle_columns(g));
        }
        let mut last_col: Vec<Option<usize>> = vec![None; layout.num_qubits];
        for (si, step) in self.steps.iter().enumerate() {
            let mut cols = std::collections::HashSet::new();
            let mut used = std::collections::HashSet::new();
            for op in &step.ops {
                if op.kind == OpKind::Cnot {
                    let c = op.column.expect("cnot carries a segment");
                    if !cols.insert(c) {
                        return Err(ScheduleError::SegmentConflict { step: si, column: c });
                    }
                }
                if op.kind != OpKind::ShuttleMove {
                    for &q in &op.qubits {
                        if !used.insert(q) {
                            return Err(ScheduleError::QubitReused { step: si, qubit: q });
                        }
                    }
                }
                if let Some(c) = op.column {
                    for &q in &op.qubits {
                        if let Some(r) = &reach[q] {
                            if !r.contains(&c) {
                                return Err(ScheduleError::ShuttleOutOfReach { step: si, qubit: q });
                            }
                            if op.kind == OpKind::ShuttleMove {
                                if let Some(prev) = last_col[q] {
                                    if prev.abs_diff(c) != 1 {
                                        return Err(ScheduleError::NonAdjacentMove {
                                            step: si,
                                            qubit: q,
                                            from: prev,
                                            to: c,
                                        });
                                    }
                                }
                            }
                            last_col[q] = Some(c);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("schedule serializes")
    }
}

/// Turns rows of measurement plans into a five-steps-per-row schedule.
/// `idle_pool` lists the non-shuttle qubits that idle whenever untouched.
pub fn assemble_rounds(
    layout: &ChainLayout,
    idle_pool: &[usize],
    rows: &[Vec<MeasurementPlan>],
) -> Result<RoundSchedule, ScheduleError> {
    let mut steps = Vec::with_capacity(rows.len() * 5);
    let mut stabilizers = Vec::new();
    for row in rows {
        let base = steps.len();
        let mut row_steps: Vec<Step> = vec![Step::default(); 5];
        let mut live = Vec::new();
        for plan in row {
            let n = plan.shuttles.len();
            let pair = matches!(plan.step_i, StepI::ShuttlePair);
            if (pair && n != 2) || (!pair && n != 1) {
                return Err(ScheduleError::BadPlan(n));
            }
            let meas_basis = match plan.kind {
                StabKind::X => Basis::X,
                StabKind::Z => Basis::Z,
            };
            for (k, sh) in plan.shuttles.iter().enumerate() {
                let init_basis = if pair {
                    if k == 0 {
                        Basis::X
                    } else {
                        Basis::Z
                    }
                } else {
                    meas_basis
                };
                row_steps[0].ops.push(StepOp::new(
                    OpKind::Init,
                    vec![sh.qubit],
                    Some(init_basis),
                    Some(sh.home),
                ));
                live.push(sh.qubit);
            }
            match plan.step_i {
                StepI::ShuttlePair => row_steps[1].ops.push(StepOp::new(
                    OpKind::Cnot,
                    vec![plan.shuttles[0].qubit, plan.shuttles[1].qubit],
                    None,
                    Some(plan.shuttles[0].home),
                )),
                StepI::Data(q) => {
                    row_steps[1]
                        .ops
                        .push(data_cnot(layout, plan.kind, plan.shuttles[0].qubit, q));
                }
            }
            for sh in &plan.shuttles {
                let mut at = sh.home;
                for (offset, target) in [(2, sh.step_ii), (3, sh.step_iii)] {
                    if let Some(q) = target {
                        let col = layout.column_of(q).expect("data qubit has a segment");
                        if col != at {
                            row_steps[offset].ops.push(StepOp::new(
                                OpKind::ShuttleMove,
                                vec![sh.qubit],
                                None,
                                Some(col),
                            ));
                            at = col;
                        }
                        row_steps[offset].ops.push(data_cnot(layout, plan.kind, sh.qubit, q));
                    }
                }
                row_steps[4]
                    .ops
                    .push(StepOp::new(OpKind::Measure, vec![sh.qubit], Some(meas_basis), Some(at)));
            }
            stabilizers.push(StabilizerInfo {
                id: stabilizers.len(),
                kind: plan.kind,
                label: plan.label,
                data_qubits: plan.support(),
                shuttles: plan.shuttles.iter().map(|s| s.qubit).collect(),
                measure_step: base + 4,
            });
        }
        for (k, step) in row_steps.iter_mut().enumerate() {
            let mut busy = vec![false; layout.num_qubits];
            for op in &step.ops {
                if op.kind != OpKind::ShuttleMove {
                    for &q in &op.qubits {
                        busy[q] = true;
                    }
                }
            }
            let shuttles_live = (1..4).contains(&k);
            let pool = idle_pool.iter().chain(live.iter().filter(|_| shuttles_live));
            for &q in pool {
                if !busy[q] {
                    step.ops.push(StepOp::idle(q));
                }
            }
        }
        steps.extend(row_steps);
    }
    Ok(RoundSchedule {
        num_qubits: layout.num_qubits,
        step_count: steps.len(),
        steps,
        stabilizers,
    })
}

fn data_cnot(layout: &ChainLayout, kind: StabKind, shuttle: usize, data: usize) -> StepOp {
    let col = layout.column_of(data);
    let qubits = match kind {
        StabKind::X => vec![shuttle, data],
        StabKind::Z => vec![data, shuttle],
    };
    StepOp::new(OpKind::Cnot, qubits, None, col)
}

/// Measurement plans for every stabiliser row of every patch. Patches are
/// measured in parallel, row by row: X rows top to bottom, then Z rows.
pub fn round_plans(layout: &ChainLayout) -> Vec<Vec<MeasurementPlan>> {
    let d = layout.d();
    let n = layout.n_logical;
    let mut rows = Vec::with_capacity(2 * d - 1);
    for i in 0..d - 1 {
        let mut row = Vec::new();
        for p in 0..n {
            for j in 0..d {
                let home = layout.global_column(p, 2 * j);
                let label = StabLabel {
                    patch: p,
                    row: i,
                    col: j,
                };
                let up = ShuttlePlan {
                    qubit: layout.patch_shuttle(p, 2 * j as isize - 1),
                    home,
                    step_ii: (j > 0).then(|| layout.h(p, j - 1, i)),
                    step_iii: Some(layout.v(p, j, i + 1)),
                };
                let low = ShuttlePlan {
                    qubit: layout.patch_shuttle(p, 2 * j as isize),
                    home,
                    step_ii: Some(layout.v(p, j, i)),
                    step_iii: (j + 1 < d).then(|| layout.h(p, j, i)),
                };
                // The outer shuttle of a patch edge is shared with the
                // neighbouring patch, so that vertex runs on one shuttle.
                let plan = if j == 0 && p > 0 {
                    MeasurementPlan {
                        kind: StabKind::X,
                        label,
                        shuttles: vec![low],
                        step_i: StepI::Data(layout.v(p, j, i + 1)),
                    }
                } else if j + 1 == d && p + 1 < n {
                    MeasurementPlan {
                        kind: StabKind::X,
                        label,
                        shuttles: vec![up],
                        step_i: StepI::Data(layout.v(p, j, i)),
                    }
                } else {
                    MeasurementPlan {
                        kind: StabKind::X,
                        label,
                        shuttles: vec![up, low],
                        step_i: StepI::ShuttlePair,
                    }
                };
                row.push(plan);
            }
        }
        rows.push(row);
    }
    for i in 0..d {
        let mut row = Vec::new();
        for p in 0..n {
            for j in 0..d - 1 {
                let home = layout.global_column(p, 2 * j + 1);
                let up = ShuttlePlan {
                    qubit: layout.patch_shuttle(p, 2 * j as isize),
                    home,
                    step_ii: Some(layout.v(p, j, i)),
                    step_iii: (i + 1 < d).then(|| layout.h(p, j, i)),
                };
                let low = ShuttlePlan {
                    qubit: layout.patch_shuttle(p, 2 * j as isize + 1),
                    home,
                    step_ii: (i > 0).then(|| layout.h(p, j, i - 1)),
                    step_iii: Some(layout.v(p, j + 1, i)),
                };
                row.push(MeasurementPlan {
                    kind: StabKind::Z,
                    label: StabLabel {
                        patch: p,
                        row: i,
                        col: j,
                    },
                    shuttles: vec![up, low],
                    step_i: StepI::ShuttlePair,
                });
            }
        }
        rows.push(row);
    }
    rows
}

/// One full round of stabiliser measurements on every patch of the layout.
pub fn schedule_round(layout: &ChainLayout) -> RoundSchedule {
    let mut pool = layout.all_data_qubits();
    pool.extend(layout.unused_qubits());
    pool.sort_unstable();
    assemble_rounds(layout, &pool, &round_plans(layout)).expect("standard plans are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::build_layout;

    #[test]
    fn d3_round_has_25_steps() {
        let l = build_layout(5, 1).unwrap();
        let r = schedule_round(&l);
        assert_eq!(r.step_count, 25);
        assert_eq!(r.x_stabilizers().count(), 6);
        assert_eq!(r.z_stabilizers().count(), 6);
        r.check(&l).unwrap();
    }

    #[test]
    fn step_count_formula_holds() {
        for s in 5..12 {
            let l = build_layout(s, 1).unwrap();
            let d = s - 2;
            assert_eq!(schedule_round(&l).step_count, 5 * (2 * d - 1));
        }
    }

    #[test]
    fn supports_match_lattice() {
        for s in 5..9 {
            let l = build_layout(s, 2).unwrap();
            let r = schedule_round(&l);
            for st in &r.stabilizers {
                let StabLabel { patch, row, col } = st.label;
                let want = match st.kind {
                    StabKind::X => l.vertex_support(patch, row, col),
                    StabKind::Z => l.plaquette_support(patch, row, col),
                };
                assert_eq!(st.data_qubits, want);
                let bulk = match st.kind {
                    StabKind::X => col > 0 && col + 1 < l.d(),
                    StabKind::Z => row > 0 && row + 1 < l.d(),
                };
                assert_eq!(st.data_qubits.len(), if bulk { 4 } else { 3 });
            }
            r.check(&l).unwrap();
        }
    }

    #[test]
    fn shuttles_initialised_and_measured_once_per_row() {
        let l = build_layout(6, 1).unwrap();
        let r = schedule_round(&l);
        for row in r.steps.chunks(5) {
            let inits: Vec<usize> = row[0]
                .ops
                .iter()
                .filter(|o| o.kind == OpKind::Init)
                .map(|o| o.qubits[0])
                .collect();
            let mut meas: Vec<usize> = row[4]
                .ops
                .iter()
                .filter(|o| o.kind == OpKind::Measure)
                .map(|o| o.qubits[0])
                .collect();
            let mut sorted = inits.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), inits.len());
            meas.sort_unstable();
            assert_eq!(sorted, meas);
            for s in &row[1..4] {
                assert!(s
                    .ops
                    .iter()
                    .all(|o| o.kind != OpKind::Init && o.kind != OpKind::Measure));
            }
        }
    }

    #[test]
    fn every_untouched_data_qubit_idles() {
        let l = build_layout(5, 1).unwrap();
        let r = schedule_round(&l);
        let data = l.all_data_qubits();
        for step in &r.steps {
            for &q in &data {
                let n = step
                    .ops
                    .iter()
                    .filter(|o| o.kind != OpKind::ShuttleMove && o.qubits.contains(&q))
                    .count();
                assert_eq!(n, 1);
            }
        }
    }

    #[test]
    fn data_qubits_in_at_most_two_of_each_type() {
        let l = build_layout(7, 1).unwrap();
        let r = schedule_round(&l);
        for q in l.all_data_qubits() {
            for kind in [StabKind::X, StabKind::Z] {
                let n = r
                    .stabilizers
                    .iter()
                    .filter(|s| s.kind == kind && s.data_qubits.contains(&q))
                    .count();
                assert!(n <= 2);
            }
        }
        for s in &r.stabilizers {
            let mut cols: Vec<usize> = s.data_qubits.iter().map(|&q| l.column_of(q).unwrap()).collect();
            cols.sort_unstable();
            cols.dedup();
            assert!(cols.len() <= 3 && cols.last().unwrap() - cols[0] <= 2);
        }
    }

    #[test]
    fn multi_patch_edges_use_single_shuttle() {
        let l = build_layout(5, 3).unwrap();
        let r = schedule_round(&l);
        r.check(&l).unwrap();
        let singles = r.stabilizers.iter().filter(|s| s.shuttles.len() == 1).count();
        // (d-1) rows, two interior patch edges, one vertex column on each side.
        assert_eq!(singles, 2 * 2 * 2);
    }
}
