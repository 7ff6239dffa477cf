//! Spatial code distance of a CSS lattice.
//!
//! Every qubit sits in at most two stabilisers of each type, so a
//! Z-type logical is a cycle in the graph whose nodes are X stabilisers
//! plus one boundary node and whose edges are qubits. A cycle is a
//! nontrivial logical iff it anticommutes with some X-type logical, which
//! is tracked as a parity mask while searching. The search is exact.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistanceError {
    #[error("qubit {qubit} lies in {count} stabilisers of one type")]
    NotGraphLike { qubit: usize, count: usize },
    #[error("stabiliser touches inactive qubit {0}")]
    InactiveQubit(usize),
    #[error("{0} logical qubits exceed the search limit")]
    TooManyLogicals(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceAudit {
    pub logical_qubits: usize,
    /// Lightest X-type logical; `None` when nothing is encoded.
    pub x_distance: Option<usize>,
    pub z_distance: Option<usize>,
    pub distance: Option<usize>,
}

type Row = Vec<u64>;

fn bit(r: &Row, i: usize) -> bool {
    (r[i >> 6] >> (i & 63)) & 1 == 1
}

fn xor(a: &mut Row, b: &Row) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

/// Incremental row echelon basis.
struct Echelon {
    rows: Vec<(usize, Row)>,
}

impl Echelon {
    fn new() -> Self {
        Self { rows: Vec::new() }
    }

    /// Adds `v`; returns whether it was independent.
    fn insert(&mut self, mut v: Row, ncols: usize) -> bool {
        for (p, r) in &self.rows {
            if bit(&v, *p) {
                xor(&mut v, r);
            }
        }
        match (0..ncols).find(|&i| bit(&v, i)) {
            Some(p) => {
                self.rows.push((p, v));
                true
            }
            None => false,
        }
    }
}

/// Basis of `{v : s.v = 0 for every row s}`.
fn kernel(rows: &[Row], ncols: usize) -> Vec<Row> {
    let mut m: Vec<Row> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| bit(&m[i], c)) else {
            continue;
        };
        m.swap(r, p);
        let piv = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && bit(row, c) {
                xor(row, &piv);
            }
        }
        pivots.push(c);
        r += 1;
    }
    let words = ncols.div_ceil(64).max(1);
    let is_pivot: BTreeSet<usize> = pivots.iter().copied().collect();
    let mut out = Vec::new();
    for f in (0..ncols).filter(|c| !is_pivot.contains(c)) {
        let mut v = vec![0u64; words];
        v[f >> 6] |= 1 << (f & 63);
        for (i, &p) in pivots.iter().enumerate() {
            if bit(&m[i], f) {
                v[p >> 6] |= 1 << (p & 63);
            }
        }
        out.push(v);
    }
    out
}

fn to_rows(supports: &[Vec<usize>], index: &BTreeMap<usize, usize>, words: usize) -> Result<Vec<Row>, DistanceError> {
    supports
        .iter()
        .map(|s| {
            let mut r = vec![0u64; words];
            for q in s {
                let i = *index.get(q).ok_or(DistanceError::InactiveQubit(*q))?;
                r[i >> 6] |= 1 << (i & 63);
            }
            Ok(r)
        })
        .collect()
}

/// Logical operators of the type of `same`, independent modulo `same`.
fn logical_basis(same: &[Row], other: &[Row], ncols: usize) -> Vec<Row> {
    let mut e = Echelon::new();
    for r in same {
        e.insert(r.clone(), ncols);
    }
    kernel(other, ncols)
        .into_iter()
        .filter(|v| e.insert(v.clone(), ncols))
        .collect()
}

/// Lightest operator of the type dual to `checks` that commutes with every
/// check and anticommutes with some row of `logicals`.
fn min_cycle(checks: &[Row], logicals: &[Row], ncols: usize) -> Result<Option<usize>, DistanceError> {
    if logicals.is_empty() {
        return Ok(None);
    }
    let k = logicals.len();
    if k > 16 {
        return Err(DistanceError::TooManyLogicals(k));
    }
    let boundary = checks.len();
    let nodes = boundary + 1;
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes];
    for q in 0..ncols {
        let ends: Vec<usize> = (0..checks.len()).filter(|&c| bit(&checks[c], q)).collect();
        if ends.len() > 2 {
            return Err(DistanceError::NotGraphLike {
                qubit: q,
                count: ends.len(),
            });
        }
        let a = ends.first().copied().unwrap_or(boundary);
        let b = ends.get(1).copied().unwrap_or(boundary);
        let mask = (0..k).filter(|&j| bit(&logicals[j], q)).fold(0usize, |m, j| m | 1 << j);
        adj[a].push((b, mask));
        if a != b {
            adj[b].push((a, mask));
        }
    }
    let states = 1usize << k;
    let mut best: Option<usize> = None;
    for s in 0..nodes {
        let mut dist = vec![usize::MAX; nodes * states];
        let mut queue = VecDeque::new();
        dist[s * states] = 0;
        queue.push_back((s, 0usize));
        while let Some((u, m)) = queue.pop_front() {
            let du = dist[u * states + m];
            if best.is_some_and(|b| du + 1 >= b) {
                break;
            }
            for &(v, e) in &adj[u] {
                let nm = m ^ e;
                let slot = v * states + nm;
                if dist[slot] == usize::MAX {
                    dist[slot] = du + 1;
                    queue.push_back((v, nm));
                }
            }
        }
        for m in 1..states {
            let d = dist[s * states + m];
            if d != usize::MAX {
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
    }
    Ok(best)
}

/// Exact X and Z distances of the lattice on `active` with the given
/// stabiliser supports.
pub fn audit_distance(
    active: &BTreeSet<usize>,
    x_stabilizers: &[Vec<usize>],
    z_stabilizers: &[Vec<usize>],
) -> Result<DistanceAudit, DistanceError> {
    let index: BTreeMap<usize, usize> = active.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let ncols = active.len();
    let words = ncols.div_ceil(64).max(1);
    let xs = to_rows(x_stabilizers, &index, words)?;
    let zs = to_rows(z_stabilizers, &index, words)?;
    let xl = logical_basis(&xs, &zs, ncols);
    let zl = logical_basis(&zs, &xs, ncols);
    // Z logicals are cycles on the X-check graph, detected by X logicals.
    let z_distance = min_cycle(&xs, &xl, ncols)?;
    let x_distance = min_cycle(&zs, &zl, ncols)?;
    let distance = match (x_distance, z_distance) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    Ok(DistanceAudit {
        logical_qubits: xl.len(),
        x_distance,
        z_distance,
        distance,
    })
}
