//! Surface-code lattices laid over a chain of segments.
//!
//! Each segment holds `d` qubits and plays one of two roles. A long segment
//! carries the vertical edges of one lattice column; a short segment carries
//! the horizontal edges between two long columns, its last qubit being the
//! half edge used to turn a rough bottom into a smooth one. The lattice of
//! a deformation step is fixed entirely by the set of active edges: every
//! vertex touching at least two active edges is an X stabiliser and every
//! plaquette bounded by at least two active edges is a Z stabiliser.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Long,
    Short,
}

/// One lattice column and the segment that holds it. Lattice row `i` lives
/// on the segment's qubit `(i + row_shift) % d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub segment: usize,
    pub role: Role,
    pub row_shift: usize,
}

/// Ordered lattice columns with alternating roles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Frame {
    pub d: usize,
    pub columns: Vec<Column>,
}

impl Frame {
    /// Consecutive segments, roles alternating from `first`.
    pub fn alternating(d: usize, segments: impl IntoIterator<Item = usize>, first: Role) -> Self {
        let mut role = first;
        let mut columns = Vec::new();
        for segment in segments {
            columns.push(Column {
                segment,
                role,
                row_shift: 0,
            });
            role = match role {
                Role::Long => Role::Short,
                Role::Short => Role::Long,
            };
        }
        Self { d, columns }
    }

    pub fn qubit(&self, col: usize, row: usize) -> usize {
        let c = &self.columns[col];
        c.segment * self.d + (row + c.row_shift) % self.d
    }

    fn role(&self, col: isize) -> Option<Role> {
        if col < 0 {
            return None;
        }
        self.columns.get(col as usize).map(|c| c.role)
    }

    fn edge(&self, active: &BTreeSet<usize>, col: isize, row: isize, want: Role) -> Option<usize> {
        if row < 0 || row >= self.d as isize || self.role(col) != Some(want) {
            return None;
        }
        let q = self.qubit(col as usize, row as usize);
        active.contains(&q).then_some(q)
    }

    /// Sorted X-stabiliser supports (vertices on long columns).
    pub fn vertices(&self, active: &BTreeSet<usize>) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for (a, c) in self.columns.iter().enumerate() {
            if c.role != Role::Long {
                continue;
            }
            let a = a as isize;
            for r in 0..self.d as isize {
                let mut s: Vec<usize> = [
                    self.edge(active, a, r, Role::Long),
                    self.edge(active, a, r + 1, Role::Long),
                    self.edge(active, a - 1, r, Role::Short),
                    self.edge(active, a + 1, r, Role::Short),
                ]
                .into_iter()
                .flatten()
                .collect();
                if s.len() >= 2 {
                    s.sort_unstable();
                    out.push(s);
                }
            }
        }
        out
    }

    /// Sorted Z-stabiliser supports (plaquettes centred on short columns).
    /// A partial face that ends on a vertex, as happens where a smooth top
    /// meets a rough one, is not a stabiliser and is left out.
    pub fn plaquettes(&self, active: &BTreeSet<usize>) -> Vec<Vec<usize>> {
        let vertices = self.vertices(active);
        let mut out = Vec::new();
        for (a, c) in self.columns.iter().enumerate() {
            if c.role != Role::Short {
                continue;
            }
            let a = a as isize;
            for i in 0..self.d as isize {
                let mut s: Vec<usize> = [
                    self.edge(active, a - 1, i, Role::Long),
                    self.edge(active, a + 1, i, Role::Long),
                    self.edge(active, a, i - 1, Role::Short),
                    self.edge(active, a, i, Role::Short),
                ]
                .into_iter()
                .flatten()
                .collect();
                if s.len() < 2 {
                    continue;
                }
                s.sort_unstable();
                let odd = vertices
                    .iter()
                    .any(|v| v.iter().filter(|q| s.binary_search(q).is_ok()).count() % 2 == 1);
                if !odd {
                    out.push(s);
                }
            }
        }
        out
    }

    /// Lattice columns whose segment lies in `segments`.
    fn columns_in(&self, segments: &std::ops::RangeInclusive<usize>) -> Vec<usize> {
        (0..self.columns.len())
            .filter(|&a| segments.contains(&self.columns[a].segment))
            .collect()
    }

    fn column_active(&self, active: &BTreeSet<usize>, a: usize) -> bool {
        (0..self.d).any(|r| active.contains(&self.qubit(a, r)))
    }

    /// Boundary type of each side of the region held by `segments`.
    pub fn sides(&self, active: &BTreeSet<usize>, segments: &std::ops::RangeInclusive<usize>) -> Sides {
        let cols: Vec<usize> = self
            .columns_in(segments)
            .into_iter()
            .filter(|&a| self.column_active(active, a))
            .collect();
        let (Some(&first), Some(&last)) = (cols.first(), cols.last()) else {
            return Sides::absent();
        };
        let on = |a: usize, r: usize| active.contains(&self.qubit(a, r));
        let longs: Vec<usize> = cols
            .iter()
            .copied()
            .filter(|&a| self.columns[a].role == Role::Long)
            .collect();
        let shorts: Vec<usize> = cols
            .iter()
            .copied()
            .filter(|&a| self.columns[a].role == Role::Short)
            .collect();
        let top = if longs.iter().any(|&a| on(a, 0)) {
            Side::Rough
        } else {
            Side::Smooth
        };
        let bottom = if shorts.iter().any(|&a| on(a, self.d - 1)) {
            Side::Smooth
        } else {
            Side::Rough
        };
        let end = |a: usize, outer: Option<usize>| {
            if outer.is_some_and(|o| self.column_active(active, o)) {
                Side::Joined
            } else if self.columns[a].role == Role::Long {
                Side::Smooth
            } else {
                Side::Rough
            }
        };
        Sides {
            top,
            bottom,
            left: end(first, first.checked_sub(1)),
            right: end(last, Some(last + 1).filter(|&o| o < self.columns.len())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Rough,
    Smooth,
    /// Merged with the neighbouring region.
    Joined,
    Absent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sides {
    pub top: Side,
    pub bottom: Side,
    pub left: Side,
    pub right: Side,
}

impl Sides {
    pub fn absent() -> Self {
        Self {
            top: Side::Absent,
            bottom: Side::Absent,
            left: Side::Absent,
            right: Side::Absent,
        }
    }
}

/// Widest run of segments touched by one stabiliser.
pub fn max_segment_span(d: usize, supports: &[Vec<usize>]) -> usize {
    supports
        .iter()
        .map(|s| {
            let lo = s.iter().map(|q| q / d).min().unwrap_or(0);
            let hi = s.iter().map(|q| q / d).max().unwrap_or(0);
            hi - lo + 1
        })
        .max()
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Standard patch on segments `0..2d-1`, short columns without their
    /// last qubit.
    fn patch(d: usize) -> (Frame, BTreeSet<usize>) {
        let f = Frame::alternating(d, 0..2 * d - 1, Role::Long);
        let mut act = BTreeSet::new();
        for (a, c) in f.columns.iter().enumerate() {
            let rows = if c.role == Role::Long { d } else { d - 1 };
            for r in 0..rows {
                act.insert(f.qubit(a, r));
            }
        }
        (f, act)
    }

    #[test]
    fn standard_patch_counts() {
        for d in 2..7 {
            let (f, act) = patch(d);
            assert_eq!(act.len(), d * d + (d - 1) * (d - 1));
            assert_eq!(f.vertices(&act).len(), d * (d - 1));
            assert_eq!(f.plaquettes(&act).len(), d * (d - 1));
            let s = f.sides(&act, &(0..=2 * d - 2));
            assert_eq!(
                s,
                Sides {
                    top: Side::Rough,
                    bottom: Side::Rough,
                    left: Side::Smooth,
                    right: Side::Smooth
                }
            );
            assert!(max_segment_span(d, &f.vertices(&act)) <= 3);
        }
    }

    #[test]
    fn bottom_extension_makes_smooth_side() {
        let d = 3;
        let (f, mut act) = patch(d);
        for a in [1, 3] {
            act.insert(f.qubit(a, d - 1));
        }
        assert_eq!(f.sides(&act, &(0..=4)).bottom, Side::Smooth);
        // One extra vertex row, plaquettes unchanged in number.
        assert_eq!(f.vertices(&act).len(), d * d);
        assert_eq!(f.plaquettes(&act).len(), d * (d - 1));
    }

    #[test]
    fn row_shift_moves_qubits() {
        let mut f = Frame::alternating(3, [4], Role::Short);
        f.columns[0].row_shift = 1;
        assert_eq!(f.qubit(0, 0), 13);
        assert_eq!(f.qubit(0, 2), 12);
    }
}
