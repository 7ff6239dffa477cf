//! One deformation step: single-qubit preparations, optional Clifford gates,
//! single-qubit readouts, then measurement of the new lattice.

use std::collections::BTreeSet;

use qsegsim_core::frame::{conjugate, Basis, CliffordGate, PauliFrame};
use qsegsim_core::pauli::{Pauli, PauliError, PauliOperator};
use qsegsim_core::stabilizer::{StabilizerError, StabilizerGroup};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distance::DistanceError;
use crate::lattice::Frame;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
    #[error("step {step}: qubit {qubit} is both prepared and measured")]
    PrepareAndMeasure { step: String, qubit: usize },
    #[error("step {step}: qubit {qubit} prepared while active")]
    AlreadyActive { step: String, qubit: usize },
    #[error("step {step}: qubit {qubit} measured while inactive")]
    NotActive { step: String, qubit: usize },
    #[error("step {step}: active set does not match preparations and readouts")]
    ActiveMismatch { step: String },
    #[error("step {step}: lattice stabilisers {a} and {b} anticommute")]
    LatticeAnticommutes { step: String, a: usize, b: usize },
    #[error("step {step}: logical {label} is measured by {by}")]
    LogicalMeasured { step: String, label: String, by: String },
    #[error("step {step}: lattice encodes {found} logical qubits, expected {expected}")]
    LogicalCount {
        step: String,
        expected: usize,
        found: usize,
    },
    #[error("step {step}: group holds {group} independent stabilisers, lattice {lattice}")]
    ExtraStabilizers { step: String, group: usize, lattice: usize },
    #[error("step {step}: code distance {found} below {d}")]
    DistanceTooSmall { step: String, found: usize, d: usize },
    #[error("logicals {a} and {b} changed their commutation")]
    CommutationChanged { a: String, b: String },
    #[error(transparent)]
    Distance(#[from] DistanceError),
    #[error("logical {label}: got {got}, expected {expected}")]
    MapMismatch {
        label: String,
        got: String,
        expected: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeformationStep {
    pub label: String,
    /// Qubits prepared in `|0>` (Z) or `|+>` (X).
    pub initialized: Vec<(usize, Basis)>,
    pub gates: Vec<CliffordGate>,
    /// Qubits read out in the `0/1` (Z) or `+/-` (X) basis and dropped.
    pub measured: Vec<(usize, Basis)>,
    pub frame: Frame,
    pub active: BTreeSet<usize>,
    pub logical_qubits: usize,
}

impl DeformationStep {
    pub fn x_stabilizers(&self) -> Vec<Vec<usize>> {
        self.frame.vertices(&self.active)
    }

    pub fn z_stabilizers(&self) -> Vec<Vec<usize>> {
        self.frame.plaquettes(&self.active)
    }

    /// The lattice stabilisers as operators, X type first.
    pub fn lattice(&self, n: usize) -> Result<Vec<PauliOperator>, PauliError> {
        let mut out = Vec::new();
        for s in self.x_stabilizers() {
            out.push(PauliOperator::uniform(n, s, Pauli::X)?);
        }
        for s in self.z_stabilizers() {
            out.push(PauliOperator::uniform(n, s, Pauli::Z)?);
        }
        Ok(out)
    }
}

/// Stabiliser group of the active qubits plus tracked logical operators.
/// Signs are not tracked: outcome-dependent byproducts form a Pauli frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolState {
    pub group: StabilizerGroup,
    pub active: BTreeSet<usize>,
}

fn basis_pauli(b: Basis) -> Pauli {
    match b {
        Basis::Z => Pauli::Z,
        Basis::X => Pauli::X,
    }
}

/// What a measurement did to the group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Already in the group: the result is fixed.
    Determined,
    Random,
}

impl ProtocolState {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            group: StabilizerGroup::new(num_qubits),
            active: BTreeSet::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.group.num_qubits()
    }

    /// Measures `m`, updating generators and logical representatives.
    pub fn measure(&mut self, m: &PauliOperator, step: &str, by: &str) -> Result<Outcome, ProtocolError> {
        let mut anti = Vec::new();
        for (i, g) in self.group.generators.iter().enumerate() {
            if !g.commutes(m)? {
                anti.push(i);
            }
        }
        // Repair with the lightest anticommuting generator, which after a
        // preparation is the fresh single-qubit one.
        if let Some(pos) = (0..anti.len()).min_by_key(|&i| (self.group.generators[anti[i]].weight(), i)) {
            anti.swap(0, pos);
        }
        let Some((&first, rest)) = anti.split_first() else {
            for (label, l) in &self.group.logical_reps {
                if !l.commutes(m)? {
                    return Err(ProtocolError::LogicalMeasured {
                        step: step.to_string(),
                        label: label.clone(),
                        by: by.to_string(),
                    });
                }
            }
            return Ok(Outcome::Determined);
        };
        let g0 = self.group.generators[first].clone();
        for &i in rest {
            self.group.generators[i].mul_assign(&g0)?;
        }
        for (_, l) in self.group.logical_reps.iter_mut() {
            if !l.commutes(m)? {
                l.mul_assign(&g0)?;
            }
        }
        self.group.generators[first] = m.clone();
        Ok(Outcome::Random)
    }

    /// Removes qubit `q` after a readout of `p` on it: every operator is
    /// cleared on `q` using the readout, which the group now contains.
    fn drop_qubit(&mut self, q: usize, p: Pauli) -> Result<(), ProtocolError> {
        let n = self.num_qubits();
        let single = PauliOperator::single(n, q, p)?;
        for g in self.group.generators.iter_mut() {
            if g.get(q)? != Pauli::I {
                g.mul_assign(&single)?;
            }
        }
        for (_, l) in self.group.logical_reps.iter_mut() {
            if l.get(q)? != Pauli::I {
                l.mul_assign(&single)?;
            }
        }
        self.group.generators.retain(|g| !g.is_identity());
        self.active.remove(&q);
        Ok(())
    }

    fn apply_gate(&mut self, gate: CliffordGate) -> Result<(), ProtocolError> {
        let conj = |op: &PauliOperator| -> Result<PauliOperator, PauliError> {
            Ok(conjugate(&PauliFrame::from_operator(op.clone()), gate)?.into_operator())
        };
        for g in self.group.generators.iter_mut() {
            *g = conj(g)?;
        }
        for (_, l) in self.group.logical_reps.iter_mut() {
            *l = conj(l)?;
        }
        Ok(())
    }
}

/// Per-step bookkeeping returned by [`apply_step`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepSummary {
    pub random_outcomes: usize,
    pub determined_outcomes: usize,
    pub logical_qubits: usize,
}

/// Preparations, gates, readouts and the new lattice, in that order.
pub fn apply_step(state: &mut ProtocolState, step: &DeformationStep) -> Result<StepSummary, ProtocolError> {
    let name = step.label.as_str();
    let n = state.num_qubits();
    let prepared: BTreeSet<usize> = step.initialized.iter().map(|x| x.0).collect();
    for &(q, _) in &step.measured {
        if prepared.contains(&q) {
            return Err(ProtocolError::PrepareAndMeasure {
                step: name.into(),
                qubit: q,
            });
        }
    }
    let mut expect = state.active.clone();
    for &(q, b) in &step.initialized {
        if !state.active.insert(q) {
            return Err(ProtocolError::AlreadyActive {
                step: name.into(),
                qubit: q,
            });
        }
        expect.insert(q);
        state
            .group
            .generators
            .push(PauliOperator::single(n, q, basis_pauli(b))?);
    }
    for &gate in &step.gates {
        state.apply_gate(gate)?;
    }
    for &(q, b) in &step.measured {
        if !state.active.contains(&q) {
            return Err(ProtocolError::NotActive {
                step: name.into(),
                qubit: q,
            });
        }
        expect.remove(&q);
        let p = basis_pauli(b);
        state.measure(&PauliOperator::single(n, q, p)?, name, &format!("readout of qubit {q}"))?;
        state.drop_qubit(q, p)?;
    }
    if expect != step.active || state.active != step.active {
        return Err(ProtocolError::ActiveMismatch { step: name.into() });
    }
    let lattice = step.lattice(n)?;
    for i in 0..lattice.len() {
        for j in i + 1..lattice.len() {
            if !lattice[i].commutes(&lattice[j])? {
                return Err(ProtocolError::LatticeAnticommutes {
                    step: name.into(),
                    a: i,
                    b: j,
                });
            }
        }
    }
    let mut summary = StepSummary {
        random_outcomes: 0,
        determined_outcomes: 0,
        logical_qubits: 0,
    };
    for (i, s) in lattice.iter().enumerate() {
        match state.measure(s, name, &format!("stabiliser {i} {s}"))? {
            Outcome::Random => summary.random_outcomes += 1,
            Outcome::Determined => summary.determined_outcomes += 1,
        }
    }
    let lat = StabilizerGroup::from_generators(n, lattice)?;
    let k = step.active.len() - lat.rank();
    summary.logical_qubits = k;
    if k != step.logical_qubits {
        return Err(ProtocolError::LogicalCount {
            step: name.into(),
            expected: step.logical_qubits,
            found: k,
        });
    }
    let gr = state.group.rank();
    let lr = lat.rank();
    if gr != lr {
        return Err(ProtocolError::ExtraStabilizers {
            step: name.into(),
            group: gr,
            lattice: lr,
        });
    }
    let mut g = lat.reduce();
    g.logical_reps = std::mem::take(&mut state.group.logical_reps);
    state.group = g;
    Ok(summary)
}
