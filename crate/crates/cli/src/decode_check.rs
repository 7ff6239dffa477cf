//! Matching on random weighted graphs against exhaustive pairing.

use qsegsim_core::decoder::{GraphEdge, MatchingGraph};
use qsegsim_core::schedule::StabKind;
use qsegsim_core::trial_rng;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::output::{CliError, Result, SCHEMA, VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphResult {
    pub seed: u64,
    pub nodes: usize,
    pub edges: usize,
    pub defects: usize,
    pub matched: i64,
    pub brute_force: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeCheckReport {
    pub version: String,
    pub schema: u32,
    pub graphs: u64,
    pub max_defects: usize,
    pub seed: u64,
    pub mismatches: Vec<GraphResult>,
    pub largest_defect_count: usize,
    pub passed: bool,
}

fn edge(a: usize, b: usize, weight: i64) -> GraphEdge {
    GraphEdge {
        a,
        b,
        probability: 0.0,
        weight,
        logical: false,
        correction: Vec::new(),
        mechanisms: 1,
    }
}

/// Connected graph on 6 to 29 nodes plus a boundary node.
pub fn random_graph(seed: u64) -> MatchingGraph {
    let mut rng = trial_rng(seed, 0);
    let n = rng.gen_range(6..30);
    let mut edges = Vec::new();
    for a in 0..n {
        if rng.gen_bool(0.4) || a == 0 {
            edges.push(edge(a, n, rng.gen_range(1..5000)));
        }
        for b in a + 1..n {
            if rng.gen_bool(0.25) {
                edges.push(edge(a, b, rng.gen_range(0..5000)));
            }
        }
        if a > 0 {
            edges.push(edge(a - 1, a, rng.gen_range(0..5000)));
        }
    }
    MatchingGraph::from_edges(StabKind::X, n, edges).expect("valid random graph")
}

/// All-pairs shortest paths by Floyd-Warshall, kept apart from the
/// decoder's own path search.
fn floyd(n: usize, edges: &[GraphEdge]) -> Vec<Vec<i64>> {
    let inf = i64::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for e in edges {
        d[e.a][e.b] = d[e.a][e.b].min(e.weight);
        d[e.b][e.a] = d[e.b][e.a].min(e.weight);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

fn brute_force(rest: &[usize], dist: &[Vec<i64>], b: usize) -> i64 {
    let Some((&first, tail)) = rest.split_first() else {
        return 0;
    };
    let mut best = dist[first][b] + brute_force(tail, dist, b);
    for i in 0..tail.len() {
        let mut others = tail.to_vec();
        let partner = others.remove(i);
        best = best.min(dist[first][partner] + brute_force(&others, dist, b));
    }
    best
}

pub fn check_graph(seed: u64, max_defects: usize) -> Result<GraphResult> {
    let g = random_graph(seed);
    let dist = floyd(g.num_nodes + 1, &g.edges);
    let mut rng = trial_rng(seed, 1);
    let k = rng.gen_range(0..=max_defects.min(g.num_nodes));
    let mut nodes: Vec<usize> = (0..g.num_nodes).collect();
    for i in 0..k {
        let j = rng.gen_range(i..nodes.len());
        nodes.swap(i, j);
    }
    let mut defects = nodes[..k].to_vec();
    defects.sort_unstable();
    let pairs = g
        .match_defects(&defects)
        .map_err(|e| CliError::Simulation(e.to_string()))?;
    Ok(GraphResult {
        seed,
        nodes: g.num_nodes,
        edges: g.edges.len(),
        defects: k,
        matched: g.pairing_weight(&pairs),
        brute_force: brute_force(&defects, &dist, g.boundary()),
    })
}

pub fn decode_check(graphs: u64, max_defects: usize, seed: u64) -> Result<DecodeCheckReport> {
    if max_defects > 14 {
        return Err(CliError::Config(
            "more than 14 defects is out of reach for exhaustive pairing".into(),
        ));
    }
    let mut mismatches = Vec::new();
    let mut largest = 0;
    for i in 0..graphs {
        let r = check_graph(seed.wrapping_add(i), max_defects)?;
        largest = largest.max(r.defects);
        if r.matched != r.brute_force {
            mismatches.push(r);
        }
    }
    Ok(DecodeCheckReport {
        version: VERSION.into(),
        schema: SCHEMA,
        graphs,
        max_defects,
        seed,
        passed: mismatches.is_empty(),
        mismatches,
        largest_defect_count: largest,
    })
}
