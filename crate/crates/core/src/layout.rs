//! Segmented-chain geometry: one segment per surface-code column.
//!
//! A patch of distance `d` spans `2d-1` segments. Even patch-local columns
//! are long (vertical edges `v(j, k)`, `k < d`), odd ones are short
//! (horizontal edges `h(j, k)`, `k < d-1`, plus one unused qubit that plays
//! the role of `h(j, d-1)` when a boundary is extended). Neighbouring
//! segments share one shuttle qubit; boundary `c` of a patch sits between
//! local columns `c` and `c+1`, with `c = -1` and `c = 2d-2` on the outside.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pauli::{Pauli, PauliOperator};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LayoutError {
    #[error("segment size {0} is unsupported (need s >= 5, i.e. d >= 3)")]
    SegmentTooSmall(usize),
    #[error("need at least one logical patch")]
    NoPatches,
    #[error("patch {patch} out of range ({n_logical} patches)")]
    PatchOutOfRange { patch: usize, n_logical: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Long,
    Short,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub kind: ColumnKind,
    pub data_qubits: Vec<usize>,
    pub unused_qubit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLayout {
    pub segment_size: usize,
    pub code_distance: usize,
    pub n_logical: usize,
    pub columns: Vec<ColumnSpec>,
    /// Shuttle qubit of global boundary `g`, stored at index `g + 1`
    /// (`g = -1` is left of column 0).
    pub shuttle_qubits: Vec<usize>,
    pub logical_qubit_extent: usize,
    pub num_qubits: usize,
    column_of: Vec<Option<usize>>,
}

pub fn build_layout(s: usize, n_logical: usize) -> Result<ChainLayout, LayoutError> {
    if s < 5 {
        return Err(LayoutError::SegmentTooSmall(s));
    }
    if n_logical == 0 {
        return Err(LayoutError::NoPatches);
    }
    let d = s - 2;
    let extent = 2 * d - 1;
    let ncols = n_logical * extent;
    let mut next = 0usize;
    let mut columns = Vec::with_capacity(ncols);
    for g in 0..ncols {
        let local = g % extent;
        if local.is_multiple_of(2) {
            let data: Vec<usize> = (next..next + d).collect();
            next += d;
            columns.push(ColumnSpec {
                kind: ColumnKind::Long,
                data_qubits: data,
                unused_qubit: None,
            });
        } else {
            let data: Vec<usize> = (next..next + d - 1).collect();
            next += d - 1;
            let unused = next;
            next += 1;
            columns.push(ColumnSpec {
                kind: ColumnKind::Short,
                data_qubits: data,
                unused_qubit: Some(unused),
            });
        }
    }
    let shuttle_qubits: Vec<usize> = (next..next + ncols + 1).collect();
    next += ncols + 1;
    let mut column_of = vec![None; next];
    for (g, c) in columns.iter().enumerate() {
        for &q in c.data_qubits.iter().chain(c.unused_qubit.iter()) {
            column_of[q] = Some(g);
        }
    }
    Ok(ChainLayout {
        segment_size: s,
        code_distance: d,
        n_logical,
        columns,
        shuttle_qubits,
        logical_qubit_extent: extent,
        num_qubits: next,
        column_of,
    })
}

impl ChainLayout {
    pub fn d(&self) -> usize {
        self.code_distance
    }

    pub fn num_columns(&self) -> usize {
        self.columns.len()
    }

    /// Global column of a data or unused qubit; `None` for shuttles.
    pub fn column_of(&self, q: usize) -> Option<usize> {
        self.column_of.get(q).copied().flatten()
    }

    pub fn is_shuttle(&self, q: usize) -> bool {
        q < self.num_qubits && self.column_of[q].is_none()
    }

    /// Shuttle at global boundary `g` (between global columns `g` and `g+1`).
    pub fn shuttle(&self, g: isize) -> usize {
        self.shuttle_qubits[(g + 1) as usize]
    }

    /// Columns a shuttle at global boundary `g` can act in.
    pub fn shuttle_columns(&self, g: isize) -> Vec<usize> {
        let n = self.columns.len() as isize;
        [g, g + 1]
            .into_iter()
            .filter(|&c| c >= 0 && c < n)
            .map(|c| c as usize)
            .collect()
    }

    fn base(&self, patch: usize) -> usize {
        patch * self.logical_qubit_extent
    }

    /// Global column index of patch-local column `local`.
    pub fn global_column(&self, patch: usize, local: usize) -> usize {
        self.base(patch) + local
    }

    /// Vertical edge `v(j, k)` of a patch: long column `j`, row `k`.
    pub fn v(&self, patch: usize, j: usize, k: usize) -> usize {
        self.columns[self.base(patch) + 2 * j].data_qubits[k]
    }

    /// Horizontal edge `h(j, k)` of a patch; `k = d-1` is the unused qubit.
    pub fn h(&self, patch: usize, j: usize, k: usize) -> usize {
        let col = &self.columns[self.base(patch) + 2 * j + 1];
        if k + 1 == self.code_distance {
            col.unused_qubit.expect("short column has an unused qubit")
        } else {
            col.data_qubits[k]
        }
    }

    /// Shuttle at patch-local boundary `c` (`-1 ..= 2d-2`).
    pub fn patch_shuttle(&self, patch: usize, c: isize) -> usize {
        self.shuttle(self.base(patch) as isize + c)
    }

    pub fn data_qubits(&self, patch: usize) -> Vec<usize> {
        let b = self.base(patch);
        self.columns[b..b + self.logical_qubit_extent]
            .iter()
            .flat_map(|c| c.data_qubits.iter().copied())
            .collect()
    }

    pub fn all_data_qubits(&self) -> Vec<usize> {
        self.columns
            .iter()
            .flat_map(|c| c.data_qubits.iter().copied())
            .collect()
    }

    pub fn unused_qubits(&self) -> Vec<usize> {
        self.columns.iter().filter_map(|c| c.unused_qubit).collect()
    }

    /// X-type stabiliser of vertex `(i, j)`, `i < d-1`, `j < d`.
    pub fn vertex_support(&self, patch: usize, i: usize, j: usize) -> Vec<usize> {
        let d = self.code_distance;
        let mut s = vec![self.v(patch, j, i), self.v(patch, j, i + 1)];
        if j > 0 {
            s.push(self.h(patch, j - 1, i));
        }
        if j + 1 < d {
            s.push(self.h(patch, j, i));
        }
        s.sort_unstable();
        s
    }

    /// Z-type stabiliser of plaquette `(i, j)`, `i < d`, `j < d-1`.
    pub fn plaquette_support(&self, patch: usize, i: usize, j: usize) -> Vec<usize> {
        let d = self.code_distance;
        let mut s = vec![self.v(patch, j, i), self.v(patch, j + 1, i)];
        if i > 0 {
            s.push(self.h(patch, j, i - 1));
        }
        if i + 1 < d {
            s.push(self.h(patch, j, i));
        }
        s.sort_unstable();
        s
    }

    /// Z-string between the rough (top and bottom) boundaries.
    pub fn logical_z(&self, patch: usize) -> PauliOperator {
        let d = self.code_distance;
        PauliOperator::from_sparse(self.num_qubits, (0..d).map(|k| (self.v(patch, 0, k), Pauli::Z)))
            .expect("indices in range")
    }

    /// X-string between the smooth (left and right) boundaries.
    pub fn logical_x(&self, patch: usize) -> PauliOperator {
        let d = self.code_distance;
        PauliOperator::from_sparse(self.num_qubits, (0..d).map(|j| (self.v(patch, j, 0), Pauli::X)))
            .expect("indices in range")
    }

    /// Qubits a logical-X string crosses; an odd Z-overlap flips the state.
    pub fn logical_x_support(&self, patch: usize) -> Vec<usize> {
        (0..self.code_distance).map(|j| self.v(patch, j, 0)).collect()
    }

    /// Qubits of the logical-Z string; an odd X-overlap is a bit flip.
    pub fn logical_z_support(&self, patch: usize) -> Vec<usize> {
        (0..self.code_distance).map(|k| self.v(patch, 0, k)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("layout serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s5_gives_distance_3_with_13_data_qubits() {
        let l = build_layout(5, 1).unwrap();
        assert_eq!(l.d(), 3);
        assert_eq!(l.all_data_qubits().len(), 13);
        assert_eq!(l.num_columns(), 5);
        assert_eq!(l.shuttle_qubits.len(), 6);
    }

    #[test]
    fn s7_gives_41_data_qubits() {
        let l = build_layout(7, 1).unwrap();
        assert_eq!(l.d(), 5);
        assert_eq!(l.data_qubits(0).len(), 41);
    }

    #[test]
    fn too_small_segments_rejected() {
        assert_eq!(build_layout(4, 1), Err(LayoutError::SegmentTooSmall(4)));
        assert_eq!(build_layout(0, 1), Err(LayoutError::SegmentTooSmall(0)));
        assert_eq!(build_layout(5, 0), Err(LayoutError::NoPatches));
    }

    #[test]
    fn every_segment_holds_s_qubits() {
        for s in 5..10 {
            let l = build_layout(s, 3).unwrap();
            for (g, c) in l.columns.iter().enumerate() {
                let own = c.data_qubits.len() + c.unused_qubit.iter().count();
                assert_eq!(own + 2, s, "column {g}");
                let want = if (g % l.logical_qubit_extent).is_multiple_of(2) {
                    ColumnKind::Long
                } else {
                    ColumnKind::Short
                };
                assert_eq!(c.kind, want);
            }
        }
    }

    #[test]
    fn indices_are_unique() {
        let l = build_layout(6, 2).unwrap();
        let mut all: Vec<usize> = l.all_data_qubits();
        all.extend(l.unused_qubits());
        all.extend(l.shuttle_qubits.iter().copied());
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), l.num_qubits);
    }

    #[test]
    fn stabilisers_and_logicals_commute() {
        for s in 5..9 {
            let l = build_layout(s, 1).unwrap();
            let d = l.d();
            let xs: Vec<PauliOperator> = (0..d - 1)
                .flat_map(|i| (0..d).map(move |j| (i, j)))
                .map(|(i, j)| {
                    PauliOperator::from_sparse(
                        l.num_qubits,
                        l.vertex_support(0, i, j).into_iter().map(|q| (q, Pauli::X)),
                    )
                    .unwrap()
                })
                .collect();
            let zs: Vec<PauliOperator> = (0..d)
                .flat_map(|i| (0..d - 1).map(move |j| (i, j)))
                .map(|(i, j)| {
                    PauliOperator::from_sparse(
                        l.num_qubits,
                        l.plaquette_support(0, i, j).into_iter().map(|q| (q, Pauli::Z)),
                    )
                    .unwrap()
                })
                .collect();
            for x in &xs {
                for z in &zs {
                    assert!(x.commutes(z).unwrap());
                }
                assert!(x.commutes(&l.logical_z(0)).unwrap());
            }
            for z in &zs {
                assert!(z.commutes(&l.logical_x(0)).unwrap());
            }
            assert!(!l.logical_x(0).commutes(&l.logical_z(0)).unwrap());
            // No stabiliser touches an unused qubit.
            for u in l.unused_qubits() {
                assert!(xs.iter().chain(&zs).all(|p| p.get(u).unwrap() == Pauli::I));
            }
        }
    }
}
