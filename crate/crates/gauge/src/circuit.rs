//! Nearest-neighbour gadgets of the four-qubit gauge code.
//!
//! A block is six units in a row, `[d0, a0, d1, d2, a1, d3]`. The data
//! units form a 2x2 grid with X gauges `X0X1`, `X2X3` and Z gauges `Z0Z2`,
//! `Z1Z3`; bare logicals are `X0X2` and `Z0Z1`. Every gadget is written in
//! terms of units, so the same templates serve every level: at level 1 a
//! unit is a surface-code qubit, at level `k` it is a level `k-1` block.

use qsegsim_core::frame::Basis;
use serde::{Deserialize, Serialize};

use crate::rates::RatesError;

pub const BLOCK: usize = 6;
pub const DATA: [usize; 4] = [0, 2, 3, 5];
pub const ANCILLA: [usize; 2] = [1, 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    Prep { q: usize, basis: Basis },
    Meas { q: usize, basis: Basis },
    Cnot { control: usize, target: usize },
    Swap { a: usize, b: usize },
}

impl Op {
    pub fn qubits(&self) -> (usize, Option<usize>) {
        match *self {
            Op::Prep { q, .. } | Op::Meas { q, .. } => (q, None),
            Op::Cnot { control, target } => (control, Some(target)),
            Op::Swap { a, b } => (a, Some(b)),
        }
    }

    fn shifted(self, by: usize) -> Op {
        match self {
            Op::Prep { q, basis } => Op::Prep { q: q + by, basis },
            Op::Meas { q, basis } => Op::Meas { q: q + by, basis },
            Op::Cnot { control, target } => Op::Cnot {
                control: control + by,
                target: target + by,
            },
            Op::Swap { a, b } => Op::Swap { a: a + by, b: b + by },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GadgetKind {
    /// Transversal CNOT between two adjacent blocks, then one round of error
    /// correction on both. `control_left` puts the control block first.
    Cnot {
        control_left: bool,
    },
    Prep(Basis),
    Meas(Basis),
    /// Two adjacent blocks trade places unit by unit, then one round of
    /// error correction on both.
    Swap,
    /// One round of error correction.
    Idle,
}

impl GadgetKind {
    pub const ALL: [GadgetKind; 8] = [
        GadgetKind::Cnot { control_left: true },
        GadgetKind::Cnot { control_left: false },
        GadgetKind::Prep(Basis::Z),
        GadgetKind::Prep(Basis::X),
        GadgetKind::Meas(Basis::Z),
        GadgetKind::Meas(Basis::X),
        GadgetKind::Swap,
        GadgetKind::Idle,
    ];

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|&k| k == self).expect("listed")
    }

    pub fn blocks(self) -> usize {
        match self {
            GadgetKind::Cnot { .. } | GadgetKind::Swap => 2,
            _ => 1,
        }
    }
}

/// One round of gauge measurements on the block at `base`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EcRound {
    pub base: usize,
    /// Layer whose ancilla readouts give the two X gauges.
    pub x_layer: usize,
    pub z_layer: usize,
    /// Decoding happens after this layer.
    pub decode_after: usize,
    /// Stabiliser type whose value is still random after a preparation in
    /// the other basis; its first readout only fixes the reference.
    pub reference: Option<Basis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gadget {
    pub kind: GadgetKind,
    pub width: usize,
    pub layers: Vec<Vec<Op>>,
    pub rounds: Vec<EcRound>,
}

impl Gadget {
    pub fn build(kind: GadgetKind) -> Self {
        match kind {
            GadgetKind::Cnot { control_left } => cnot_gadget(control_left),
            GadgetKind::Prep(b) => prep_gadget(b),
            GadgetKind::Meas(b) => meas_gadget(b),
            GadgetKind::Swap => swap_gadget(),
            GadgetKind::Idle => {
                let mut g = Gadget {
                    kind,
                    width: BLOCK,
                    layers: Vec::new(),
                    rounds: Vec::new(),
                };
                g.push_ec(&[0], None);
                g
            }
        }
    }

    pub fn data_positions(&self, block: usize) -> [usize; 4] {
        DATA.map(|q| q + block * BLOCK)
    }

    pub fn ops(&self) -> impl Iterator<Item = &Op> {
        self.layers.iter().flatten()
    }

    /// Appends one round of error correction on each listed block, run in
    /// parallel.
    fn push_ec(&mut self, blocks: &[usize], reference: Option<Basis>) {
        let start = self.layers.len();
        let mut merged: Vec<Vec<Op>> = vec![Vec::new(); 10];
        for &b in blocks {
            for (i, layer) in ec_layers().into_iter().enumerate() {
                merged[i].extend(layer.into_iter().map(|op| op.shifted(b * BLOCK)));
            }
        }
        self.layers.extend(merged);
        for &b in blocks {
            self.rounds.push(EcRound {
                base: b * BLOCK,
                x_layer: start + 3,
                z_layer: start + 8,
                decode_after: start + 9,
                reference,
            });
        }
    }
}

/// X gauges through the ancillas, a swap of `d1` and `d2` so that each
/// ancilla sits between a Z-gauge pair, Z gauges, and the swap back.
fn ec_layers() -> Vec<Vec<Op>> {
    use Basis::{X, Z};
    let [a0, a1] = ANCILLA;
    vec![
        vec![Op::Prep { q: a0, basis: X }, Op::Prep { q: a1, basis: X }],
        vec![Op::Cnot { control: a0, target: 0 }, Op::Cnot { control: a1, target: 3 }],
        vec![Op::Cnot { control: a0, target: 2 }, Op::Cnot { control: a1, target: 5 }],
        vec![Op::Meas { q: a0, basis: X }, Op::Meas { q: a1, basis: X }],
        vec![Op::Swap { a: 2, b: 3 }],
        vec![Op::Prep { q: a0, basis: Z }, Op::Prep { q: a1, basis: Z }],
        // d1 now sits at 3 and d2 at 2.
        vec![Op::Cnot { control: 0, target: a0 }, Op::Cnot { control: 3, target: a1 }],
        vec![Op::Cnot { control: 2, target: a0 }, Op::Cnot { control: 5, target: a1 }],
        vec![Op::Meas { q: a0, basis: Z }, Op::Meas { q: a1, basis: Z }],
        vec![Op::Swap { a: 2, b: 3 }],
    ]
}

fn prep_gadget(basis: Basis) -> Gadget {
    let mut g = Gadget {
        kind: GadgetKind::Prep(basis),
        width: BLOCK,
        layers: vec![DATA.iter().map(|&q| Op::Prep { q, basis }).collect()],
        rounds: Vec::new(),
    };
    let random = match basis {
        Basis::Z => Basis::X,
        Basis::X => Basis::Z,
    };
    g.push_ec(&[0], Some(random));
    g
}

fn meas_gadget(basis: Basis) -> Gadget {
    Gadget {
        kind: GadgetKind::Meas(basis),
        width: BLOCK,
        layers: vec![DATA.iter().map(|&q| Op::Meas { q, basis }).collect()],
        rounds: Vec::new(),
    }
}

/// Unit labels used while routing two blocks together.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Token {
    Data { block: usize, index: usize },
    Ancilla,
}

fn initial_tokens() -> Vec<Token> {
    let mut out = Vec::new();
    for block in 0..2 {
        for q in 0..BLOCK {
            out.push(match DATA.iter().position(|&p| p == q) {
                Some(index) => Token::Data { block, index },
                None => Token::Ancilla,
            });
        }
    }
    out
}

/// Adjacent transpositions needed to sort `from` into `to`; ancillas are
/// interchangeable and keep their relative order.
fn inversions(from: &[Token], to: &[Token]) -> usize {
    let rank = target_ranks(from, to);
    let mut n = 0;
    for i in 0..rank.len() {
        for j in i + 1..rank.len() {
            if rank[i] > rank[j] {
                n += 1;
            }
        }
    }
    n
}

fn target_ranks<T: PartialEq>(from: &[T], to: &[T]) -> Vec<usize> {
    let mut used = vec![false; to.len()];
    from.iter()
        .map(|t| {
            let i = (0..to.len()).find(|&i| !used[i] && to[i] == *t).expect("same multiset");
            used[i] = true;
            i
        })
        .collect()
}

/// Layout with every data pair `(A_i, B_i)` adjacent that is reachable with
/// the fewest swaps.
fn best_interleaving() -> Vec<Token> {
    let start = initial_tokens();
    let mut best: Option<(usize, Vec<Token>)> = None;
    // Eight slots: four pair tokens and four ancillas.
    let mut slots = Vec::new();
    place(&mut slots, [false; 4], 0, &mut |arr: &[Option<usize>]| {
        for orient in 0..16u32 {
            let mut t = Vec::new();
            for s in arr {
                match *s {
                    None => t.push(Token::Ancilla),
                    Some(i) => {
                        let (first, second) = if orient >> i & 1 == 0 { (0, 1) } else { (1, 0) };
                        t.push(Token::Data { block: first, index: i });
                        t.push(Token::Data {
                            block: second,
                            index: i,
                        });
                    }
                }
            }
            let c = inversions(&start, &t);
            if best.as_ref().is_none_or(|(b, _)| c < *b) {
                best = Some((c, t));
            }
        }
    });
    best.expect("nonempty").1
}

fn place(slots: &mut Vec<Option<usize>>, used: [bool; 4], ancillas: usize, f: &mut impl FnMut(&[Option<usize>])) {
    if slots.len() == 8 {
        f(slots);
        return;
    }
    if ancillas < 4 {
        slots.push(None);
        place(slots, used, ancillas + 1, f);
        slots.pop();
    }
    for i in 0..4 {
        if !used[i] {
            let mut u = used;
            u[i] = true;
            slots.push(Some(i));
            place(slots, u, ancillas, f);
            slots.pop();
        }
    }
}

/// Odd-even transposition sort of `from` into `to`, as parallel swap layers.
fn route(from: &[Token], to: &[Token]) -> Vec<Vec<Op>> {
    odd_even(target_ranks(from, to))
}

fn odd_even(mut rank: Vec<usize>) -> Vec<Vec<Op>> {
    let mut layers = Vec::new();
    let mut parity = 0;
    let mut idle_passes = 0;
    while idle_passes < 2 {
        let mut layer = Vec::new();
        let mut i = parity;
        while i + 1 < rank.len() {
            if rank[i] > rank[i + 1] {
                rank.swap(i, i + 1);
                layer.push(Op::Swap { a: i, b: i + 1 });
            }
            i += 2;
        }
        parity ^= 1;
        if layer.is_empty() {
            idle_passes += 1;
        } else {
            idle_passes = 0;
            layers.push(layer);
        }
    }
    layers
}

fn cnot_gadget(control_left: bool) -> Gadget {
    let start = initial_tokens();
    let target = best_interleaving();
    let there = route(&start, &target);
    let back = route(&target, &start);
    let mut layers = there;
    let mut cnots = Vec::new();
    for (p, t) in target.iter().enumerate() {
        if let Token::Data { block: 0, index } = *t {
            let partner = target
                .iter()
                .position(|u| *u == Token::Data { block: 1, index })
                .expect("pair");
            let (c, tq) = if control_left { (p, partner) } else { (partner, p) };
            cnots.push(Op::Cnot { control: c, target: tq });
        }
    }
    layers.push(cnots);
    layers.extend(back);
    let mut g = Gadget {
        kind: GadgetKind::Cnot { control_left },
        width: 2 * BLOCK,
        layers,
        rounds: Vec::new(),
    };
    g.push_ec(&[0, 1], None);
    g
}

fn swap_gadget() -> Gadget {
    let start: Vec<usize> = (0..2 * BLOCK).collect();
    let target: Vec<usize> = (BLOCK..2 * BLOCK).chain(0..BLOCK).collect();
    let mut g = Gadget {
        kind: GadgetKind::Swap,
        width: 2 * BLOCK,
        layers: odd_even(target_ranks(&start, &target)),
        rounds: Vec::new(),
    };
    g.push_ec(&[0, 1], None);
    g
}

/// Flattened description of one level-`n` CNOT exRec on `2 * 6^n`
/// surface-code qubits. Ops are generated on demand; level 4 has far too
/// many to store.
#[derive(Debug, Clone)]
pub struct Circuit {
    pub level: usize,
    templates: Vec<Gadget>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub prep: u64,
    pub meas: u64,
    pub cnot: u64,
    pub swap: u64,
}

impl OpCounts {
    pub fn total(&self) -> u64 {
        self.prep + self.meas + self.cnot + self.swap
    }

    fn add(&mut self, o: &OpCounts) {
        self.prep += o.prep;
        self.meas += o.meas;
        self.cnot += o.cnot;
        self.swap += o.swap;
    }
}

pub fn build_gauge_circuit(n: usize) -> Result<Circuit, RatesError> {
    if !(1..=4).contains(&n) {
        return Err(RatesError::Level(n));
    }
    Ok(Circuit {
        level: n,
        templates: GadgetKind::ALL.iter().map(|&k| Gadget::build(k)).collect(),
    })
}

impl Circuit {
    pub fn num_qubits(&self) -> usize {
        2 * BLOCK.pow(self.level as u32)
    }

    pub fn gadget(&self, kind: GadgetKind) -> &Gadget {
        &self.templates[kind.index()]
    }

    /// Calls `f` on every physical op in time order.
    pub fn for_each_op(&self, mut f: impl FnMut(Op)) {
        self.expand(GadgetKind::Cnot { control_left: true }, self.level, 0, &mut f);
    }

    pub fn ops(&self) -> Vec<Op> {
        let mut v = Vec::new();
        self.for_each_op(|op| v.push(op));
        v
    }

    fn expand(&self, kind: GadgetKind, level: usize, base: usize, f: &mut impl FnMut(Op)) {
        let unit = BLOCK.pow(level as u32 - 1);
        for op in self.gadget(kind).ops() {
            if level == 1 {
                f(op.shifted(base));
                continue;
            }
            let (a, b) = op.qubits();
            let l = b.map_or(a, |b| a.min(b));
            self.expand(unit_kind(op), level - 1, base + l * unit, f);
        }
    }

    /// Physical op counts, computed without expanding.
    pub fn counts(&self) -> OpCounts {
        // counts[k] lists every gadget kind at level k + 1.
        let mut counts: Vec<Vec<OpCounts>> = Vec::new();
        for level in 1..=self.level {
            let row = GadgetKind::ALL
                .iter()
                .map(|&kind| {
                    let mut c = OpCounts::default();
                    for op in self.gadget(kind).ops() {
                        if level == 1 {
                            match op {
                                Op::Prep { .. } => c.prep += 1,
                                Op::Meas { .. } => c.meas += 1,
                                Op::Cnot { .. } => c.cnot += 1,
                                Op::Swap { .. } => c.swap += 1,
                            }
                        } else {
                            c.add(&counts[level - 2][unit_kind(op).index()]);
                        }
                    }
                    c
                })
                .collect();
            counts.push(row);
        }
        counts[self.level - 1][GadgetKind::Cnot { control_left: true }.index()]
    }
}

/// The lower-level gadget an op stands for.
pub fn unit_kind(op: &Op) -> GadgetKind {
    match *op {
        Op::Prep { basis, .. } => GadgetKind::Prep(basis),
        Op::Meas { basis, .. } => GadgetKind::Meas(basis),
        Op::Cnot { control, target } => GadgetKind::Cnot {
            control_left: control < target,
        },
        Op::Swap { .. } => GadgetKind::Swap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routing_reaches_target_and_back() {
        let start = initial_tokens();
        let target = best_interleaving();
        let mut cur = start.clone();
        for layer in route(&start, &target) {
            for op in layer {
                if let Op::Swap { a, b } = op {
                    assert_eq!(b, a + 1);
                    cur.swap(a, b);
                }
            }
        }
        assert_eq!(cur, target);
    }

    #[test]
    fn swap_gadget_exchanges_blocks() {
        let g = Gadget::build(GadgetKind::Swap);
        let mut units: Vec<usize> = (0..2 * BLOCK).collect();
        for op in g.layers.iter().flatten().take(BLOCK * BLOCK) {
            let Op::Swap { a, b } = *op else { panic!("{op:?}") };
            units.swap(a, b);
        }
        let want: Vec<usize> = (BLOCK..2 * BLOCK).chain(0..BLOCK).collect();
        assert_eq!(units, want);
    }

    #[test]
    fn ec_round_shape() {
        let g = Gadget::build(GadgetKind::Idle);
        assert_eq!(g.layers.len(), 10);
        assert_eq!(g.ops().filter(|o| matches!(o, Op::Cnot { .. })).count(), 8);
        assert_eq!(g.ops().filter(|o| matches!(o, Op::Swap { .. })).count(), 2);
    }
}
