//! Space-time matching graphs derived from single-fault propagation, and
//! the minimum-weight perfect matching decoder built on them.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::layout::ChainLayout;
use crate::matching::{min_weight_perfect_matching, WeightedEdge};
use crate::noise::NoiseParams;
use crate::pauli::PauliOperator;
use crate::schedule::{RoundSchedule, StabKind};
use crate::sim::{enumerate_single_faults, MemoryCircuit, SyndromeRecord, TrialOutcome};

/// Fixed-point scale for `-ln p` edge weights.
pub const WEIGHT_SCALE: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecoderError {
    #[error("a single fault fires {count} {kind:?}-type detectors")]
    TooManyEvents { kind: StabKind, count: usize },
    #[error("detector {0} cannot reach the boundary")]
    Unreachable(usize),
    #[error("defect {0} outside the graph")]
    BadDefect(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub a: usize,
    /// Equal to the graph's boundary index for boundary edges.
    pub b: usize,
    pub probability: f64,
    pub weight: i64,
    /// Whether applying this edge's correction flips the tracked logical.
    pub logical: bool,
    /// Data qubits of the representative residual error.
    pub correction: Vec<usize>,
    pub mechanisms: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchingGraph {
    /// Type of the stabilisers whose events form the nodes.
    pub kind: StabKind,
    pub num_stabs: usize,
    pub rounds: usize,
    /// Detector nodes `0..num_nodes`; node `num_nodes` is the boundary.
    pub num_nodes: usize,
    pub edges: Vec<GraphEdge>,
    /// Merged mechanisms whose logical bit disagreed with the edge's.
    pub inconsistent_merges: usize,
    #[serde(skip)]
    dist: Vec<i64>,
    #[serde(skip)]
    parity: Vec<bool>,
    #[serde(skip)]
    pred: Vec<u32>,
}

impl MatchingGraph {
    /// Graph from explicit edges; `b == num_nodes` marks a boundary edge.
    pub fn from_edges(kind: StabKind, num_nodes: usize, edges: Vec<GraphEdge>) -> Result<Self, DecoderError> {
        let mut g = MatchingGraph {
            kind,
            num_stabs: num_nodes,
            rounds: 0,
            num_nodes,
            edges,
            inconsistent_merges: 0,
            dist: Vec::new(),
            parity: Vec::new(),
            pred: Vec::new(),
        };
        g.finish()?;
        Ok(g)
    }

    pub fn boundary(&self) -> usize {
        self.num_nodes
    }

    fn stride(&self) -> usize {
        self.num_nodes + 1
    }

    /// Shortest-path cost between two nodes (boundary included).
    pub fn distance(&self, a: usize, b: usize) -> i64 {
        self.dist[a * self.stride() + b]
    }

    /// Logical parity accumulated along the chosen shortest path.
    pub fn path_parity(&self, a: usize, b: usize) -> bool {
        self.parity[a * self.stride() + b]
    }

    /// Edge indices of the shortest path from `a` to `b`.
    pub fn path_edges(&self, a: usize, b: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = b;
        while cur != a {
            let e = self.pred[a * self.stride() + cur];
            if e == u32::MAX {
                break;
            }
            let ed = &self.edges[e as usize];
            out.push(e as usize);
            cur = if ed.a == cur { ed.b } else { ed.a };
        }
        out
    }

    fn finish(&mut self) -> Result<(), DecoderError> {
        let n = self.stride();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (k, e) in self.edges.iter().enumerate() {
            adj[e.a].push((e.b, k));
            adj[e.b].push((e.a, k));
        }
        self.dist = vec![i64::MAX; n * n];
        self.parity = vec![false; n * n];
        self.pred = vec![u32::MAX; n * n];
        for s in 0..n {
            let row = s * n;
            self.dist[row + s] = 0;
            let mut heap = BinaryHeap::new();
            heap.push(Reverse((0i64, s)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > self.dist[row + u] {
                    continue;
                }
                for &(v, k) in &adj[u] {
                    let nd = d + self.edges[k].weight;
                    if nd < self.dist[row + v] {
                        self.dist[row + v] = nd;
                        self.parity[row + v] = self.parity[row + u] ^ self.edges[k].logical;
                        self.pred[row + v] = k as u32;
                        heap.push(Reverse((nd, v)));
                    }
                }
            }
        }
        let b = self.boundary();
        for v in 0..self.num_nodes {
            if self.dist[v * n + b] == i64::MAX {
                return Err(DecoderError::Unreachable(v));
            }
        }
        Ok(())
    }

    /// Pairs defects with each other or with the boundary at minimum total
    /// path weight. Returns `(u, v)` pairs; `v` may be the boundary.
    pub fn match_defects(&self, defects: &[usize]) -> Result<Vec<(usize, usize)>, DecoderError> {
        let b = self.boundary();
        for &d in defects {
            if d >= self.num_nodes {
                return Err(DecoderError::BadDefect(d));
            }
        }
        let k = defects.len();
        match k {
            0 => return Ok(Vec::new()),
            1 => return Ok(vec![(defects[0], b)]),
            2 => {
                let (u, v) = (defects[0], defects[1]);
                let pair = self.distance(u, v);
                let apart = self.distance(u, b) + self.distance(v, b);
                return Ok(if pair < apart {
                    vec![(u, v)]
                } else {
                    vec![(u, b), (v, b)]
                });
            }
            _ => {}
        }
        // Defect i is node i, its boundary copy is node k + i.
        let mut edges = Vec::with_capacity(k * k);
        for i in 0..k {
            let bi = self.distance(defects[i], b);
            edges.push(WeightedEdge {
                u: i,
                v: k + i,
                weight: bi,
            });
            for j in i + 1..k {
                let bj = self.distance(defects[j], b);
                let dij = self.distance(defects[i], defects[j]);
                if dij < bi + bj {
                    edges.push(WeightedEdge {
                        u: i,
                        v: j,
                        weight: dij,
                    });
                }
                edges.push(WeightedEdge {
                    u: k + i,
                    v: k + j,
                    weight: 0,
                });
            }
        }
        let mate = min_weight_perfect_matching(2 * k, &edges).expect("boundary copies make it perfect");
        let mut out = Vec::new();
        for i in 0..k {
            let m = mate[i];
            if m == k + i {
                out.push((defects[i], b));
            } else if m < k && i < m {
                out.push((defects[i], defects[m]));
            }
        }
        Ok(out)
    }

    /// Total path weight of a pairing.
    pub fn pairing_weight(&self, pairs: &[(usize, usize)]) -> i64 {
        pairs.iter().map(|&(u, v)| self.distance(u, v)).sum()
    }

    /// Logical flip implied by a pairing.
    pub fn pairing_parity(&self, pairs: &[(usize, usize)]) -> bool {
        pairs.iter().fold(false, |a, &(u, v)| a ^ self.path_parity(u, v))
    }

    /// Correction operator: product of edge corrections along every path.
    pub fn pairing_correction(&self, pairs: &[(usize, usize)], num_qubits: usize) -> PauliOperator {
        let mut op = PauliOperator::identity(num_qubits);
        for &(u, v) in pairs {
            for e in self.path_edges(u, v) {
                for &q in &self.edges[e].correction {
                    match self.kind {
                        StabKind::X => op.flip_z_bit(q),
                        StabKind::Z => op.flip_x_bit(q),
                    }
                }
            }
        }
        op
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("graph serializes")
    }
}

#[derive(Debug, Clone, Default)]
struct Acc {
    p_keep: f64,
    p_flip: f64,
    p_max: f64,
    correction: Vec<usize>,
    count: usize,
}

fn weight_of(p: f64) -> i64 {
    ((-p.ln()) * WEIGHT_SCALE).round().max(0.0) as i64
}

/// Matching graph for one stabiliser type, built from the single faults of
/// a one-round template tiled over `rounds` noisy rounds.
pub fn build_matching_graph(
    layout: &ChainLayout,
    schedule: &RoundSchedule,
    noise: &NoiseParams,
    kind: StabKind,
    rounds: usize,
) -> Result<MatchingGraph, DecoderError> {
    let template = MemoryCircuit::new(layout, schedule, *noise);
    graph_from_circuit(&template, kind, rounds)
}

pub fn graph_from_circuit(
    circuit: &MemoryCircuit,
    kind: StabKind,
    rounds: usize,
) -> Result<MatchingGraph, DecoderError> {
    let ns = match kind {
        StabKind::X => circuit.num_x_stabilizers(),
        StabKind::Z => circuit.num_z_stabilizers(),
    };
    let num_nodes = ns * (rounds + 1);
    let boundary = num_nodes;
    // Keyed by node pair in the template (layers 0 and 1).
    let mut merged: BTreeMap<(usize, usize), Acc> = BTreeMap::new();
    let mut inconsistent = 0usize;
    for f in enumerate_single_faults(circuit, 1) {
        let ev = match kind {
            StabKind::X => &f.x_events,
            StabKind::Z => &f.z_events,
        };
        if ev.len() > 2 {
            return Err(DecoderError::TooManyEvents { kind, count: ev.len() });
        }
        if ev.is_empty() {
            continue;
        }
        let a = ev[0] as usize;
        let b = if ev.len() == 2 { ev[1] as usize } else { usize::MAX };
        let (phase, bit) = circuit.logical_flips(&f.residual);
        let flip = match kind {
            StabKind::X => phase,
            StabKind::Z => bit,
        };
        let acc = merged.entry((a, b)).or_default();
        if flip {
            acc.p_flip += f.probability;
        } else {
            acc.p_keep += f.probability;
        }
        // The most likely mechanism supplies the representative correction.
        if f.probability > acc.p_max {
            acc.p_max = f.probability;
            acc.correction = match kind {
                StabKind::X => f.residual.z_part().support(),
                StabKind::Z => f.residual.x_part().support(),
            };
        }
        acc.count += 1;
    }
    // Every tile holds distinct faults, so mechanisms landing on the same
    // absolute node pair add up.
    let mut tiled: BTreeMap<(usize, usize), Acc> = BTreeMap::new();
    for r in 0..rounds {
        let shift = r * ns;
        for (&(a, b), acc) in &merged {
            let na = a + shift;
            let nb = if b == usize::MAX { boundary } else { b + shift };
            let t = tiled.entry((na.min(nb), na.max(nb))).or_default();
            t.p_keep += acc.p_keep;
            t.p_flip += acc.p_flip;
            t.count += acc.count;
            if acc.p_max > t.p_max {
                t.p_max = acc.p_max;
                t.correction = acc.correction.clone();
            }
        }
    }
    let mut edges = Vec::with_capacity(tiled.len());
    for ((a, b), t) in tiled {
        if t.p_keep > 0.0 && t.p_flip > 0.0 {
            inconsistent += 1;
        }
        let p = t.p_keep + t.p_flip;
        edges.push(GraphEdge {
            a,
            b,
            probability: p,
            weight: weight_of(p),
            logical: t.p_flip > t.p_keep,
            correction: t.correction,
            mechanisms: t.count,
        });
    }
    let mut g = MatchingGraph {
        kind,
        num_stabs: ns,
        rounds,
        num_nodes,
        edges,
        inconsistent_merges: inconsistent,
        dist: Vec::new(),
        parity: Vec::new(),
        pred: Vec::new(),
    };
    g.finish()?;
    Ok(g)
}

/// Decoders for both error types of a memory experiment.
#[derive(Debug, Clone)]
pub struct MemoryDecoder {
    pub circuit: MemoryCircuit,
    pub rounds: usize,
    pub phase_graph: MatchingGraph,
    pub bit_graph: MatchingGraph,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Verdict {
    /// Logical Z (phase) error after correction.
    pub phase: bool,
    /// Logical X (bit) error after correction.
    pub bit: bool,
}

impl MemoryDecoder {
    pub fn new(
        layout: &ChainLayout,
        schedule: &RoundSchedule,
        noise: NoiseParams,
        rounds: usize,
    ) -> Result<Self, DecoderError> {
        let circuit = MemoryCircuit::new(layout, schedule, noise);
        let phase_graph = graph_from_circuit(&circuit, StabKind::X, rounds)?;
        let bit_graph = graph_from_circuit(&circuit, StabKind::Z, rounds)?;
        Ok(Self {
            circuit,
            rounds,
            phase_graph,
            bit_graph,
        })
    }

    /// Fast path: path parities instead of explicit correction operators.
    pub fn judge(&self, o: &TrialOutcome) -> Verdict {
        let (phase_raw, bit_raw) = self.circuit.logical_flips(&o.frame);
        let dx: Vec<usize> = o.x_events.iter().map(|&e| e as usize).collect();
        let dz: Vec<usize> = o.z_events.iter().map(|&e| e as usize).collect();
        let px = self.phase_graph.match_defects(&dx).expect("events inside graph");
        let pz = self.bit_graph.match_defects(&dz).expect("events inside graph");
        Verdict {
            phase: phase_raw ^ self.phase_graph.pairing_parity(&px),
            bit: bit_raw ^ self.bit_graph.pairing_parity(&pz),
        }
    }

    /// Applies the explicit correction to the final frame.
    pub fn corrected_frame(&self, o: &TrialOutcome) -> PauliOperator {
        let n = self.circuit.num_qubits();
        let dx: Vec<usize> = o.x_events.iter().map(|&e| e as usize).collect();
        let dz: Vec<usize> = o.z_events.iter().map(|&e| e as usize).collect();
        let cx = self
            .phase_graph
            .pairing_correction(&self.phase_graph.match_defects(&dx).expect("in graph"), n);
        let cz = self
            .bit_graph
            .pairing_correction(&self.bit_graph.match_defects(&dz).expect("in graph"), n);
        o.frame.multiply(&cx).and_then(|f| f.multiply(&cz)).expect("same width")
    }

    /// Verdict for a full syndrome record.
    pub fn judge_record(&self, rec: &SyndromeRecord) -> Verdict {
        let nx = self.circuit.num_x_stabilizers();
        let nz = self.circuit.num_z_stabilizers();
        let xi = self.circuit.stab_ids(StabKind::X);
        let zi = self.circuit.stab_ids(StabKind::Z);
        let mut o = TrialOutcome {
            x_events: Vec::new(),
            z_events: Vec::new(),
            frame: rec.final_frame.clone(),
        };
        for &(sid, r) in &rec.detection_events {
            if let Some(l) = xi.iter().position(|&s| s == sid) {
                o.x_events.push((r * nx + l) as u32);
            } else if let Some(l) = zi.iter().position(|&s| s == sid) {
                o.z_events.push((r * nz + l) as u32);
            }
        }
        o.x_events.sort_unstable();
        o.z_events.sort_unstable();
        self.judge(&o)
    }
}

/// Whether the residual after correction flips the logical state.
pub fn judge_logical_failure(decoder: &MemoryDecoder, record: &SyndromeRecord) -> Verdict {
    decoder.judge_record(record)
}
