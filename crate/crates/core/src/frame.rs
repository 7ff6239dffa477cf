//! Pauli-frame propagation through the Clifford gates used by the
//! stabiliser-measurement circuits (CNOT, Hadamard, init, measure).

use serde::{Deserialize, Serialize};

use crate::pauli::{Pauli, PauliError, PauliOperator};

/// Preparation / readout basis. `X` means `|+>` preparation or `+/-` readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    /// The Pauli error that flips a preparation or readout in this basis.
    pub fn flip_pauli(self) -> Pauli {
        match self {
            Basis::Z => Pauli::X,
            Basis::X => Pauli::Z,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CliffordGate {
    Cnot { control: usize, target: usize },
    Hadamard(usize),
    Init { qubit: usize, basis: Basis },
    Measure { qubit: usize, basis: Basis },
}

/// Accumulated Pauli error of one simulation trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliFrame {
    op: PauliOperator,
}

impl PauliFrame {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            op: PauliOperator::identity(num_qubits),
        }
    }

    pub fn from_operator(op: PauliOperator) -> Self {
        Self { op }
    }

    pub fn operator(&self) -> &PauliOperator {
        &self.op
    }

    pub fn into_operator(self) -> PauliOperator {
        self.op
    }

    pub fn num_qubits(&self) -> usize {
        self.op.num_qubits()
    }

    pub fn clear(&mut self) {
        self.op = PauliOperator::identity(self.op.num_qubits());
    }

    fn check(&self, q: usize) -> Result<(), PauliError> {
        if q >= self.op.num_qubits() {
            return Err(PauliError::QubitOutOfRange {
                qubit: q,
                num_qubits: self.op.num_qubits(),
            });
        }
        Ok(())
    }

    /// Multiplies a single-qubit Pauli into the frame (unchecked index).
    #[inline]
    pub fn apply_pauli(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        if x {
            self.op.flip_x_bit(q);
        }
        if z {
            self.op.flip_z_bit(q);
        }
    }

    pub fn apply_operator(&mut self, p: &PauliOperator) -> Result<(), PauliError> {
        self.op.mul_assign(p)
    }

    /// `X_c -> X_c X_t`, `Z_t -> Z_c Z_t` (unchecked indices).
    #[inline]
    pub fn cnot(&mut self, c: usize, t: usize) {
        if self.op.x_bit(c) {
            self.op.flip_x_bit(t);
        }
        if self.op.z_bit(t) {
            self.op.flip_z_bit(c);
        }
    }

    #[inline]
    pub fn hadamard(&mut self, q: usize) {
        let x = self.op.x_bit(q);
        let z = self.op.z_bit(q);
        self.op.set_x_bit(q, z);
        self.op.set_z_bit(q, x);
    }

    /// Fresh preparation discards whatever error the qubit carried.
    #[inline]
    pub fn reset(&mut self, q: usize) {
        self.op.set_x_bit(q, false);
        self.op.set_z_bit(q, false);
    }

    /// Whether a readout of `q` in `basis` is flipped by the frame.
    #[inline]
    pub fn measurement_flip(&self, q: usize, basis: Basis) -> bool {
        match basis {
            Basis::Z => self.op.x_bit(q),
            Basis::X => self.op.z_bit(q),
        }
    }

    /// Checked gate application.
    pub fn apply_gate(&mut self, gate: CliffordGate) -> Result<(), PauliError> {
        match gate {
            CliffordGate::Cnot { control, target } => {
                self.check(control)?;
                self.check(target)?;
                self.cnot(control, target);
            }
            CliffordGate::Hadamard(q) => {
                self.check(q)?;
                self.hadamard(q);
            }
            CliffordGate::Init { qubit, .. } => {
                self.check(qubit)?;
                self.reset(qubit);
            }
            CliffordGate::Measure { qubit, .. } => self.check(qubit)?,
        }
        Ok(())
    }
}

/// Conjugates `frame` by `gate`, returning the updated frame.
pub fn conjugate(frame: &PauliFrame, gate: CliffordGate) -> Result<PauliFrame, PauliError> {
    let mut out = frame.clone();
    out.apply_gate(gate)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn frame(s: &str) -> PauliFrame {
        PauliFrame::from_operator(PauliOperator::parse(s).unwrap())
    }

    #[test]
    fn cnot_spreads_x_forward() {
        let f = conjugate(&frame("XI"), CliffordGate::Cnot { control: 0, target: 1 }).unwrap();
        assert_eq!(f.operator().to_string(), "XX");
    }

    #[test]
    fn cnot_keeps_control_z() {
        let f = conjugate(&frame("ZI"), CliffordGate::Cnot { control: 0, target: 1 }).unwrap();
        assert_eq!(f.operator().to_string(), "ZI");
        let g = conjugate(&frame("IZ"), CliffordGate::Cnot { control: 0, target: 1 }).unwrap();
        assert_eq!(g.operator().to_string(), "ZZ");
    }

    #[test]
    fn hadamard_swaps_x_and_z() {
        let f = conjugate(&frame("X"), CliffordGate::Hadamard(0)).unwrap();
        assert_eq!(f.operator().to_string(), "Z");
        let g = conjugate(&frame("Y"), CliffordGate::Hadamard(0)).unwrap();
        assert_eq!(g.operator().to_string(), "Y");
    }

    #[test]
    fn init_clears_and_measure_reads() {
        let f = conjugate(
            &frame("YX"),
            CliffordGate::Init {
                qubit: 0,
                basis: Basis::Z,
            },
        )
        .unwrap();
        assert_eq!(f.operator().to_string(), "IX");
        assert!(f.measurement_flip(1, Basis::Z));
        assert!(!f.measurement_flip(1, Basis::X));
    }

    #[test]
    fn bad_index_is_rejected() {
        assert!(conjugate(&frame("XI"), CliffordGate::Hadamard(2)).is_err());
        assert!(conjugate(&frame("XI"), CliffordGate::Cnot { control: 0, target: 5 }).is_err());
    }

    fn arb_op(n: usize) -> impl Strategy<Value = PauliOperator> {
        proptest::collection::vec(0usize..4, n).prop_map(move |v| {
            PauliOperator::from_sparse(n, v.into_iter().enumerate().map(|(q, i)| (q, Pauli::from_index(i)))).unwrap()
        })
    }

    fn arb_gate(n: usize) -> impl Strategy<Value = CliffordGate> {
        prop_oneof![
            (0..n, 0..n)
                .prop_filter("distinct", |(a, b)| a != b)
                .prop_map(|(control, target)| CliffordGate::Cnot { control, target }),
            (0..n).prop_map(CliffordGate::Hadamard),
        ]
    }

    proptest! {
        #[test]
        fn unitary_conjugation_preserves_commutation(p in arb_op(5), q in arb_op(5), g in arb_gate(5)) {
            let before = p.commutes(&q).unwrap();
            let p2 = conjugate(&PauliFrame::from_operator(p), g).unwrap();
            let q2 = conjugate(&PauliFrame::from_operator(q), g).unwrap();
            prop_assert_eq!(before, p2.operator().commutes(q2.operator()).unwrap());
        }
    }
}
