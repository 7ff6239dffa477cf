//! Stabiliser groups over GF(2) with named logical representatives.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{PauliError, PauliOperator};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StabilizerError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("generators {0} and {1} anticommute")]
    AnticommutingGenerators(usize, usize),
    #[error("logical {label} anticommutes with generator {generator}")]
    LogicalNotInCentralizer { label: String, generator: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizerGroup {
    num_qubits: usize,
    pub generators: Vec<PauliOperator>,
    pub logical_reps: Vec<(String, PauliOperator)>,
}

/// Row-reduces `rows` in place (each row `[x | z]` packed) and returns the
/// pivot column of every surviving row. Zero rows are dropped.
fn row_reduce(rows: &mut Vec<Vec<u64>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let (w, b) = (col >> 6, col & 63);
        let Some(p) = (r..rows.len()).find(|&i| (rows[i][w] >> b) & 1 == 1) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && (row[w] >> b) & 1 == 1 {
                for (a, c) in row.iter_mut().zip(&pivot) {
                    *a ^= c;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    pivots
}

impl StabilizerGroup {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            generators: Vec::new(),
            logical_reps: Vec::new(),
        }
    }

    pub fn from_generators(num_qubits: usize, generators: Vec<PauliOperator>) -> Result<Self, StabilizerError> {
        for g in &generators {
            if g.num_qubits() != num_qubits {
                return Err(PauliError::LengthMismatch {
                    left: num_qubits,
                    right: g.num_qubits(),
                }
                .into());
            }
        }
        Ok(Self {
            num_qubits,
            generators,
            logical_reps: Vec::new(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn with_logical(mut self, label: impl Into<String>, op: PauliOperator) -> Self {
        self.logical_reps.push((label.into(), op));
        self
    }

    pub fn logical(&self, label: &str) -> Option<&PauliOperator> {
        self.logical_reps.iter().find(|(l, _)| l == label).map(|(_, p)| p)
    }

    pub fn logical_mut(&mut self, label: &str) -> Option<&mut PauliOperator> {
        self.logical_reps.iter_mut().find(|(l, _)| l == label).map(|(_, p)| p)
    }

    /// Checks mutual commutation of generators and that every logical
    /// representative lies in the centralizer.
    pub fn validate(&self) -> Result<(), StabilizerError> {
        for i in 0..self.generators.len() {
            for j in i + 1..self.generators.len() {
                if !self.generators[i].commutes(&self.generators[j])? {
                    return Err(StabilizerError::AnticommutingGenerators(i, j));
                }
            }
        }
        for (label, l) in &self.logical_reps {
            for (gi, g) in self.generators.iter().enumerate() {
                if !l.commutes(g)? {
                    return Err(StabilizerError::LogicalNotInCentralizer {
                        label: label.clone(),
                        generator: gi,
                    });
                }
            }
        }
        Ok(())
    }

    /// GF(2) rank of the generator set.
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Vec<u64>> = self.generators.iter().map(|g| g.row()).collect();
        row_reduce(&mut rows, 2 * self.row_words() * 64).len()
    }

    fn row_words(&self) -> usize {
        self.num_qubits.div_ceil(64)
    }

    /// Reduced row-echelon form of the generators; dependent generators are
    /// removed. Logical representatives are kept unchanged.
    pub fn reduce(&self) -> StabilizerGroup {
        let w = self.row_words();
        let mut rows: Vec<Vec<u64>> = self.generators.iter().map(|g| g.row()).collect();
        // Pivot on actual qubit columns only; padding bits are always zero.
        row_reduce(&mut rows, 2 * w * 64);
        StabilizerGroup {
            num_qubits: self.num_qubits,
            generators: rows
                .iter()
                .map(|r| PauliOperator::from_row(self.num_qubits, r))
                .collect(),
            logical_reps: self.logical_reps.clone(),
        }
    }

    /// Whether `p` lies in the group generated by the generators (up to phase).
    pub fn contains(&self, p: &PauliOperator) -> Result<bool, StabilizerError> {
        if p.num_qubits() != self.num_qubits {
            return Err(PauliError::LengthMismatch {
                left: self.num_qubits,
                right: p.num_qubits(),
            }
            .into());
        }
        Ok(self.residue(p).is_identity())
    }

    /// `p` reduced against the row-echelon generators; identity iff member.
    pub fn residue(&self, p: &PauliOperator) -> PauliOperator {
        let w = self.row_words();
        let mut rows: Vec<Vec<u64>> = self.generators.iter().map(|g| g.row()).collect();
        let pivots = row_reduce(&mut rows, 2 * w * 64);
        let mut v = p.row();
        for (row, &col) in rows.iter().zip(&pivots) {
            if (v[col >> 6] >> (col & 63)) & 1 == 1 {
                for (a, c) in v.iter_mut().zip(row) {
                    *a ^= c;
                }
            }
        }
        PauliOperator::from_row(self.num_qubits, &v)
    }

    /// Whether `a` and `b` are equal modulo the group.
    pub fn equivalent(&self, a: &PauliOperator, b: &PauliOperator) -> Result<bool, StabilizerError> {
        self.contains(&a.multiply(b)?)
    }
}

/// Free function form of [`StabilizerGroup::reduce`].
pub fn reduce(group: &StabilizerGroup) -> StabilizerGroup {
    group.reduce()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Pauli;
    use proptest::prelude::*;

    fn p(s: &str) -> PauliOperator {
        PauliOperator::parse(s).unwrap()
    }

    #[test]
    fn dependent_generator_removed() {
        let g = StabilizerGroup::from_generators(2, vec![p("XX"), p("XX")]).unwrap();
        let r = g.reduce();
        assert_eq!(r.generators, vec![p("XX")]);
    }

    #[test]
    fn independent_generators_kept() {
        let g = StabilizerGroup::from_generators(2, vec![p("XI"), p("IX")]).unwrap();
        let r = g.reduce();
        assert_eq!(r.generators.len(), 2);
        assert!(r.contains(&p("XI")).unwrap());
        assert!(r.contains(&p("IX")).unwrap());
        assert!(!r.contains(&p("ZI")).unwrap());
    }

    #[test]
    fn membership_of_product() {
        let g = StabilizerGroup::from_generators(4, vec![p("XXII"), p("IIXX")]).unwrap();
        assert!(g.contains(&p("XXXX")).unwrap());
        assert!(!g.contains(&p("XIXI")).unwrap());
    }

    #[test]
    fn validate_catches_anticommuting_generators() {
        let g = StabilizerGroup::from_generators(2, vec![p("XI"), p("ZI")]).unwrap();
        assert_eq!(g.validate(), Err(StabilizerError::AnticommutingGenerators(0, 1)));
        let h = StabilizerGroup::from_generators(4, vec![p("XXXX"), p("ZZZZ")])
            .unwrap()
            .with_logical("X", p("XXII"))
            .with_logical("Z", p("ZIZI"));
        assert!(h.validate().is_ok());
        let bad = h.clone().with_logical("bad", p("ZIII"));
        assert!(matches!(
            bad.validate(),
            Err(StabilizerError::LogicalNotInCentralizer { .. })
        ));
    }

    fn arb_ops(n: usize, k: usize) -> impl Strategy<Value = Vec<PauliOperator>> {
        proptest::collection::vec(proptest::collection::vec(0usize..4, n), 1..k).prop_map(move |rows| {
            rows.into_iter()
                .map(|v| {
                    PauliOperator::from_sparse(n, v.into_iter().enumerate().map(|(q, i)| (q, Pauli::from_index(i))))
                        .unwrap()
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn reduce_is_idempotent_and_preserves_group(gens in arb_ops(6, 8)) {
            let g = StabilizerGroup::from_generators(6, gens.clone()).unwrap();
            let r = g.reduce();
            let rr = r.reduce();
            prop_assert_eq!(&r.generators, &rr.generators);
            prop_assert_eq!(r.generators.len(), g.rank());
            for orig in &gens {
                prop_assert!(r.contains(orig).unwrap());
            }
        }
    }
}
