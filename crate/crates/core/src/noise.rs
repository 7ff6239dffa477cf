//! Depolarizing noise channels and the per-operation error budget.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::Basis;
use crate::pauli::Pauli;
use crate::schedule::{OpKind, StepOp};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("rate {name} = {value} outside [0, 1]")]
    RateOutOfRange { name: &'static str, value: f64 },
    #[error("code distance {0} too small")]
    DistanceTooSmall(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub eps2: f64,
    pub eps1: f64,
    pub eps_i: f64,
    pub eps_m: f64,
    pub eps0: f64,
    pub d: usize,
}

pub fn derive_rates(eps2: f64, d: usize) -> Result<NoiseParams, NoiseError> {
    if d < 3 {
        return Err(NoiseError::DistanceTooSmall(d));
    }
    let p = NoiseParams {
        eps2,
        eps1: eps2 / 10.0,
        eps_i: eps2,
        eps_m: eps2,
        eps0: eps2 / (5.0 * (2.0 * d as f64 - 1.0)),
        d,
    };
    p.validate()?;
    Ok(p)
}

impl NoiseParams {
    pub fn noiseless(d: usize) -> Self {
        Self {
            eps2: 0.0,
            eps1: 0.0,
            eps_i: 0.0,
            eps_m: 0.0,
            eps0: 0.0,
            d,
        }
    }

    pub fn validate(&self) -> Result<(), NoiseError> {
        for (name, value) in [
            ("eps2", self.eps2),
            ("eps1", self.eps1),
            ("epsI", self.eps_i),
            ("epsM", self.eps_m),
            ("eps0", self.eps0),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(NoiseError::RateOutOfRange { name, value });
            }
        }
        Ok(())
    }

    /// Fault channels attached to one scheduled operation. Gate noise acts
    /// after the gate; measurement flips act just before the readout.
    pub fn channels(&self, op: &StepOp) -> Vec<Channel> {
        let q = op.qubits[0];
        let mut out = Vec::new();
        match op.kind {
            OpKind::Cnot => out.push(Channel::Depol2 {
                a: op.qubits[0],
                b: op.qubits[1],
                rate: self.eps2,
            }),
            OpKind::Init => {
                let basis = op.basis.unwrap_or(Basis::Z);
                if basis == Basis::X {
                    out.push(Channel::Depol1 { q, rate: self.eps1 });
                }
                out.push(Channel::Flip {
                    q,
                    pauli: basis.flip_pauli(),
                    rate: self.eps_i,
                });
            }
            OpKind::Measure => {
                let basis = op.basis.unwrap_or(Basis::Z);
                if basis == Basis::X {
                    out.push(Channel::Depol1 { q, rate: self.eps1 });
                }
                out.push(Channel::Flip {
                    q,
                    pauli: basis.flip_pauli(),
                    rate: self.eps_m,
                });
            }
            OpKind::Hadamard => out.push(Channel::Depol1 { q, rate: self.eps1 }),
            OpKind::Idle => out.push(Channel::Depol1 { q, rate: self.eps0 }),
            OpKind::ShuttleMove => {}
        }
        out.retain(|c| c.rate() > 0.0);
        out
    }
}

/// One independent fault mechanism.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Channel {
    Depol1 { q: usize, rate: f64 },
    Depol2 { a: usize, b: usize, rate: f64 },
    Flip { q: usize, pauli: Pauli, rate: f64 },
}

impl Channel {
    pub fn rate(&self) -> f64 {
        match *self {
            Channel::Depol1 { rate, .. } | Channel::Depol2 { rate, .. } | Channel::Flip { rate, .. } => rate,
        }
    }

    /// Every non-identity outcome with its probability.
    pub fn outcomes(&self) -> Vec<(Vec<(usize, Pauli)>, f64)> {
        match *self {
            Channel::Depol1 { q, rate } => Pauli::NON_IDENTITY
                .iter()
                .map(|&p| (vec![(q, p)], rate / 3.0))
                .collect(),
            Channel::Depol2 { a, b, rate } => (1..16)
                .map(|k| {
                    let (pa, pb) = two_qubit_pauli(k);
                    let mut v = Vec::with_capacity(2);
                    if pa != Pauli::I {
                        v.push((a, pa));
                    }
                    if pb != Pauli::I {
                        v.push((b, pb));
                    }
                    (v, rate / 15.0)
                })
                .collect(),
            Channel::Flip { q, pauli, rate } => vec![(vec![(q, pauli)], rate)],
        }
    }

    /// Draws a non-identity outcome, given that this channel fired.
    pub fn sample_fired<R: Rng + ?Sized>(&self, rng: &mut R) -> [(usize, Pauli); 2] {
        match *self {
            Channel::Depol1 { q, .. } => [(q, Pauli::from_index(rng.gen_range(1..4))), (q, Pauli::I)],
            Channel::Depol2 { a, b, .. } => {
                let (pa, pb) = two_qubit_pauli(rng.gen_range(1..16));
                [(a, pa), (b, pb)]
            }
            Channel::Flip { q, pauli, .. } => [(q, pauli), (q, Pauli::I)],
        }
    }
}

/// `k in 0..16` to a pair of Paulis, `k = 0` being `I (x) I`.
pub fn two_qubit_pauli(k: usize) -> (Pauli, Pauli) {
    (Pauli::from_index(k / 4), Pauli::from_index(k % 4))
}

/// `I` with probability `1 - rate`, otherwise X, Y or Z uniformly.
pub fn sample_one_qubit_channel<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> Pauli {
    if rng.gen::<f64>() < rate {
        Pauli::from_index(rng.gen_range(1..4))
    } else {
        Pauli::I
    }
}

/// `I (x) I` with probability `1 - rate`, otherwise one of the 15 others.
pub fn sample_two_qubit_channel<R: Rng + ?Sized>(rate: f64, rng: &mut R) -> (Pauli, Pauli) {
    if rng.gen::<f64>() < rate {
        two_qubit_pauli(rng.gen_range(1..16))
    } else {
        (Pauli::I, Pauli::I)
    }
}
