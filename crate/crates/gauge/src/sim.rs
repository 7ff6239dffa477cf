//! Hierarchical Monte Carlo of the concatenated gauge code.
//!
//! Level-1 gadgets run on surface-code qubits with depolarising logical
//! errors. A level-`k` gadget runs the same template on level `k-1` blocks,
//! drawing each lower-level gadget's outcome (logical Pauli plus detection
//! flags) from the histogram measured one level down. A block is flagged
//! when its decoder could not pin down its logical frame; the next level
//! decodes by trying every Pauli the flagged outcomes could hide.
//!
//! Gadgets start from clean inputs and are decoded as if a perfect round of
//! syndrome extraction followed them.
//!
//! Outcome codes: two-block gadgets use bits `xL zL xR zR fL fR` (left and
//! right block), one-block gadgets `x z f`, readouts `flip f`.

use qsegsim_core::frame::Basis;
use qsegsim_core::sim::trial_rng;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Gadget, GadgetKind, Op, ANCILLA, DATA};
use crate::rates::{LogicalRates, RatesError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Duration {
    /// Initialisation or readout.
    Short,
    Cnot,
    Swap,
}

/// A place where a lower-level operation can go wrong.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Location {
    Prep(Basis),
    Meas(Basis),
    Cnot { control_left: bool },
    Swap,
    Idle(Duration),
}

impl Location {
    /// Number of distinct outcome codes, `0` meaning no error.
    pub fn outcomes(self, flags: bool) -> u8 {
        let bits = match self {
            Location::Cnot { .. } | Location::Swap => 4 + 2 * flags as u32,
            Location::Prep(_) | Location::Idle(_) => 2 + flags as u32,
            Location::Meas(_) => 1 + flags as u32,
        };
        1 << bits
    }
}

pub trait Sampler {
    fn sample(&mut self, loc: Location) -> u8;
    /// Called at the start of every layer.
    fn layer(&mut self, _index: usize) {}
}

/// Level-1 noise: depolarising errors on surface-code logical operations.
pub struct PhysicalSampler<'a, R: Rng> {
    pub rates: &'a LogicalRates,
    pub rng: R,
}

impl<R: Rng> Sampler for PhysicalSampler<'_, R> {
    fn sample(&mut self, loc: Location) -> u8 {
        let r = self.rates;
        let u: f64 = self.rng.gen();
        match loc {
            Location::Prep(b) => {
                if u < r.p_im {
                    match b {
                        Basis::Z => 1,
                        Basis::X => 2,
                    }
                } else {
                    0
                }
            }
            Location::Meas(_) => (u < r.p_im) as u8,
            Location::Cnot { .. } | Location::Swap => {
                let p = if loc == Location::Swap { r.p_swap } else { r.p_cnot };
                if u < p {
                    self.rng.gen_range(1..16)
                } else {
                    0
                }
            }
            Location::Idle(d) => {
                let p = match d {
                    Duration::Short => r.memory_short(),
                    Duration::Cnot => r.memory_cnot(),
                    Duration::Swap => r.memory_swap(),
                };
                if u < p {
                    self.rng.gen_range(1..4)
                } else {
                    0
                }
            }
        }
    }
}

/// Outcome distribution of one gadget type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dist {
    pub counts: Vec<u64>,
    pub trials: u64,
    /// `(cumulative probability, code)` over nonzero codes.
    cum: Vec<(f64, u8)>,
}

impl Dist {
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let trials: u64 = counts.iter().sum();
        let mut cum = Vec::new();
        let mut acc = 0.0;
        for (code, &c) in counts.iter().enumerate().skip(1) {
            if c > 0 {
                acc += c as f64 / trials as f64;
                cum.push((acc, code as u8));
            }
        }
        Self { counts, trials, cum }
    }

    pub fn probability(&self, code: usize) -> f64 {
        self.counts[code] as f64 / self.trials.max(1) as f64
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u8 {
        let Some(&(total, _)) = self.cum.last() else {
            return 0;
        };
        let u: f64 = rng.gen();
        if u >= total {
            return 0;
        }
        let i = self.cum.partition_point(|&(c, _)| c <= u);
        self.cum[i.min(self.cum.len() - 1)].1
    }
}

/// Measured outcome histograms of every gadget at one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelStats {
    pub level: usize,
    /// Indexed by [`GadgetKind::index`]; `None` if not simulated.
    pub dists: Vec<Option<Dist>>,
}

impl LevelStats {
    pub fn dist(&self, kind: GadgetKind) -> &Dist {
        self.dists[kind.index()]
            .as_ref()
            .expect("gadget simulated at this level")
    }
}

pub struct EffectiveSampler<'a, R: Rng> {
    pub below: &'a LevelStats,
    pub rng: R,
}

impl<R: Rng> Sampler for EffectiveSampler<'_, R> {
    fn sample(&mut self, loc: Location) -> u8 {
        let b = self.below;
        match loc {
            Location::Prep(x) => b.dist(GadgetKind::Prep(x)).sample(&mut self.rng),
            Location::Meas(x) => b.dist(GadgetKind::Meas(x)).sample(&mut self.rng),
            Location::Cnot { control_left } => b.dist(GadgetKind::Cnot { control_left }).sample(&mut self.rng),
            Location::Swap => b.dist(GadgetKind::Swap).sample(&mut self.rng),
            // An idle block runs one round of error correction per layer.
            Location::Idle(_) => b.dist(GadgetKind::Idle).sample(&mut self.rng),
        }
    }
}

/// Noise-free except for one forced outcome; also lists every location.
#[derive(Debug, Clone)]
pub struct Injector {
    pub target: usize,
    pub code: u8,
    pub seen: Vec<Location>,
    /// Layer of each entry of `seen`.
    pub layers: Vec<usize>,
    current: usize,
}

impl Injector {
    pub fn new(target: usize, code: u8) -> Self {
        Self {
            target,
            code,
            seen: Vec::new(),
            layers: Vec::new(),
            current: 0,
        }
    }

    /// Every location of `g`, in the order the sampler is consulted.
    pub fn locations(g: &Gadget) -> Vec<Location> {
        let mut inj = Self::new(usize::MAX, 0);
        propagate(g, &mut inj);
        inj.seen
    }
}

impl Sampler for Injector {
    fn sample(&mut self, loc: Location) -> u8 {
        let i = self.seen.len();
        self.seen.push(loc);
        self.layers.push(self.current);
        if i == self.target {
            self.code
        } else {
            0
        }
    }

    fn layer(&mut self, index: usize) {
        self.current = index;
    }
}

/// Pauli frame of up to 16 units plus readout flips.
#[derive(Debug, Clone, Copy, Default)]
struct Frame {
    x: u16,
    z: u16,
    mflip: u16,
    live: u16,
}

fn bit(m: u16, q: usize) -> bool {
    m >> q & 1 == 1
}

impl Frame {
    fn apply_single(&mut self, q: usize, code: u8) {
        let m = 1u16 << q;
        if code & 1 != 0 {
            self.x ^= m;
        }
        if code & 2 != 0 {
            self.z ^= m;
        }
    }

    fn apply_pair(&mut self, l: usize, r: usize, code: u8) {
        self.apply_single(l, code & 3);
        self.apply_single(r, code >> 2 & 3);
    }

    fn cnot(&mut self, c: usize, t: usize) {
        if bit(self.x, c) {
            self.x ^= 1 << t;
        }
        if bit(self.z, t) {
            self.z ^= 1 << c;
        }
    }

    fn exchange(&mut self, a: usize, b: usize) {
        for m in [&mut self.x, &mut self.z, &mut self.live] {
            if bit(*m, a) != bit(*m, b) {
                *m ^= 1 << a | 1 << b;
            }
        }
    }

    fn clear(&mut self, q: usize) {
        let m = !(1u16 << q);
        self.x &= m;
        self.z &= m;
        self.live &= m;
    }
}

fn duration(layer: &[Op]) -> Duration {
    if layer.iter().any(|o| matches!(o, Op::Swap { .. })) {
        Duration::Swap
    } else if layer.iter().any(|o| matches!(o, Op::Cnot { .. })) {
        Duration::Cnot
    } else {
        Duration::Short
    }
}

// Layout of an effect word: data unit `i` of block `b` keeps its X error at
// bit `8b + i` and its Z error at `8b + 4 + i` (readout flips use the X
// bits); the measured syndromes of block `b` sit at `16 + 2b` (X type) and
// `17 + 2b` (Z type). Bits `20 + 2b` and `21 + 2b` hold the true syndromes
// of what is left on the block at the end, as a perfect next round would
// see them.
const CHECKS: u32 = 0xff << 16;

fn block_word(e: u32, b: usize) -> u8 {
    (e >> (8 * b)) as u8
}

/// Runs `g` with the outcomes `s` hands out, no decoding. The result is
/// linear in the sampled Pauli parts.
fn propagate(g: &Gadget, s: &mut impl Sampler) -> u32 {
    let mut st = Frame::default();
    let blocks = g.kind.blocks();
    if !matches!(g.kind, GadgetKind::Prep(_)) {
        for b in 0..blocks {
            for q in g.data_positions(b) {
                st.live |= 1 << q;
            }
        }
    }
    let mut record = 0u32;
    for (li, layer) in g.layers.iter().enumerate() {
        s.layer(li);
        let mut touched = 0u16;
        for op in layer {
            match *op {
                Op::Prep { q, basis } => {
                    st.clear(q);
                    st.live |= 1 << q;
                    let code = s.sample(Location::Prep(basis));
                    st.apply_single(q, code & 3);
                    touched |= 1 << q;
                }
                Op::Meas { q, basis } => {
                    let v = match basis {
                        Basis::Z => bit(st.x, q),
                        Basis::X => bit(st.z, q),
                    };
                    let code = s.sample(Location::Meas(basis));
                    let flip = v != (code & 1 == 1);
                    st.mflip = (st.mflip & !(1 << q)) | (flip as u16) << q;
                    st.clear(q);
                    touched |= 1 << q;
                }
                Op::Cnot { control, target } => {
                    st.cnot(control, target);
                    let code = s.sample(Location::Cnot {
                        control_left: control < target,
                    });
                    st.apply_pair(control.min(target), control.max(target), code);
                    touched |= 1 << control | 1 << target;
                }
                Op::Swap { a, b } => {
                    let (l, r) = (a.min(b), a.max(b));
                    st.exchange(l, r);
                    let code = s.sample(Location::Swap);
                    st.apply_pair(l, r, code);
                    touched |= 1 << l | 1 << r;
                }
            }
        }
        let dur = duration(layer);
        for q in 0..g.width {
            if bit(st.live, q) && !bit(touched, q) {
                let code = s.sample(Location::Idle(dur));
                st.apply_single(q, code & 3);
            }
        }
        for round in &g.rounds {
            let [a0, a1] = ANCILLA.map(|q| q + round.base);
            let parity = bit(st.mflip, a0) != bit(st.mflip, a1);
            let block = round.base / crate::circuit::BLOCK;
            for (layer, basis, shift) in [(round.x_layer, Basis::X, 16), (round.z_layer, Basis::Z, 17)] {
                if layer != li {
                    continue;
                }
                if round.reference == Some(basis) {
                    // Random outcome: it fixes the frame instead. The X
                    // stabiliser sign is set with Z on d0 and vice versa.
                    if parity {
                        let d0 = DATA[0] + round.base;
                        match basis {
                            Basis::X => st.z ^= 1 << d0,
                            Basis::Z => st.x ^= 1 << d0,
                        }
                    }
                } else if parity {
                    record ^= 1 << (shift + 2 * block);
                }
            }
        }
    }
    let mut e = record;
    for b in 0..blocks {
        for (i, q) in g.data_positions(b).into_iter().enumerate() {
            if let GadgetKind::Meas(_) = g.kind {
                e |= (bit(st.mflip, q) as u32) << i;
            } else {
                e |= (bit(st.x, q) as u32) << (8 * b + i);
                e |= (bit(st.z, q) as u32) << (8 * b + 4 + i);
            }
        }
    }
    for b in 0..blocks {
        let w = block_word(e, b);
        let (x, z) = (w & 0xf, w >> 4);
        e |= (z.count_ones() & 1) << (20 + 2 * b) | (x.count_ones() & 1) << (21 + 2 * b);
    }
    e
}

fn pauli_bits(loc: Location) -> u32 {
    match loc {
        Location::Cnot { .. } | Location::Swap => 4,
        Location::Prep(_) | Location::Idle(_) => 2,
        Location::Meas(_) => 1,
    }
}

/// Pauli codes a flagged outcome may hide: a two-block outcome flagged on
/// one side only is trusted on the other.
fn suspect_codes(loc: Location, flags: u8) -> &'static [u8] {
    const ALL: [u8; 16] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15];
    const RIGHT: [u8; 4] = [0, 4, 8, 12];
    match pauli_bits(loc) {
        4 => match flags {
            1 => &ALL[..4],
            2 => &RIGHT,
            _ => &ALL,
        },
        2 => &ALL[..4],
        _ => &ALL[..2],
    }
}

/// Largest number of joint hypotheses the decoder enumerates.
const MAX_HYPOTHESES: usize = 1 << 12;

/// A gadget compiled to the effect of every fault on its syndrome record
/// and outgoing Pauli frame, plus the decoder that reads them.
///
/// The decoder knows which lower-level outcomes were flagged. It tries
/// every Pauli those flagged outcomes could hide, keeps the combinations
/// that reproduce the measured syndromes and corrects with the lightest.
/// A block is flagged when the surviving combinations disagree about it
/// or nothing explains the record.
#[derive(Debug, Clone)]
pub struct Model {
    pub kind: GadgetKind,
    pub locations: Vec<Location>,
    /// Layer of each location.
    pub layers: Vec<usize>,
    /// `effects[i][c]`: effect word of Pauli code `c` at location `i`.
    effects: Vec<Vec<u32>>,
}

impl Model {
    pub fn new(g: &Gadget) -> Self {
        let mut all = Injector::new(usize::MAX, 0);
        propagate(g, &mut all);
        let (locations, layers) = (all.seen, all.layers);
        let effects = locations
            .iter()
            .enumerate()
            .map(|(i, &loc)| {
                (0..1u8 << pauli_bits(loc))
                    .map(|c| {
                        if c == 0 {
                            0
                        } else {
                            propagate(g, &mut Injector::new(i, c))
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            kind: g.kind,
            locations,
            layers,
            effects,
        }
    }

    /// Samples every location once and decodes; returns the outcome code.
    pub fn run(&self, s: &mut impl Sampler) -> u8 {
        let mut e = 0u32;
        let mut flagged: Vec<(usize, u8)> = Vec::new();
        for (i, &loc) in self.locations.iter().enumerate() {
            let code = s.sample(loc);
            let pb = pauli_bits(loc);
            e ^= self.effects[i][(code & ((1 << pb) - 1)) as usize];
            let flags = code >> pb;
            if flags != 0 {
                flagged.push((i, flags));
            }
        }
        self.decode(e, &flagged)
    }

    fn effect(&self, flagged: &[(usize, u8)], choice: &[u8]) -> u32 {
        flagged
            .iter()
            .zip(choice)
            .fold(0, |acc, (&(i, _), &c)| acc ^ self.effects[i][c as usize])
    }

    /// `(syndrome nonzero, logical bits)` of a block's share of an effect.
    fn judge(&self, w: u8) -> (bool, u8) {
        let (x, z) = (w & 0xf, w >> 4);
        match self.kind {
            GadgetKind::Meas(basis) => {
                let pair = match basis {
                    Basis::Z => 0b0011,
                    Basis::X => 0b0101,
                };
                (x.count_ones() % 2 == 1, ((x & pair).count_ones() % 2) as u8)
            }
            _ => {
                let syn = x.count_ones() % 2 == 1 || z.count_ones() % 2 == 1;
                let lx = (x ^ x >> 1) & 1;
                let lz = (z ^ z >> 2) & 1;
                let mask = match self.kind {
                    GadgetKind::Prep(Basis::Z) => 1,
                    GadgetKind::Prep(Basis::X) => 2,
                    _ => 3,
                };
                (syn, (lx | lz << 1) & mask)
            }
        }
    }

    fn decode(&self, e: u32, flagged: &[(usize, u8)]) -> u8 {
        let blocks = self.kind.blocks();
        let sets: Vec<&[u8]> = flagged
            .iter()
            .map(|&(i, f)| suspect_codes(self.locations[i], f))
            .collect();
        let total = sets.iter().try_fold(1usize, |acc, s| {
            acc.checked_mul(s.len()).filter(|&n| n <= MAX_HYPOTHESES)
        });
        let mut best: Option<(u32, u32)> = None;
        let mut consistent = Vec::new();
        if let Some(total) = total {
            let mut choice = vec![0u8; sets.len()];
            for mut k in 0..total {
                let mut weight = 0;
                for (c, set) in choice.iter_mut().zip(&sets) {
                    *c = set[k % set.len()];
                    k /= set.len();
                    weight += (*c != 0) as u32;
                }
                let h = self.effect(flagged, &choice);
                if (e ^ h) & CHECKS == 0 {
                    consistent.push(h);
                    if best.is_none_or(|(w, _)| weight < w) {
                        best = Some((weight, h));
                    }
                }
            }
        }
        let mut out = 0u8;
        for b in 0..blocks {
            let mut flag = match best {
                Some((_, h)) => consistent
                    .iter()
                    .any(|&o| self.judge(block_word(o ^ h, b)) != (false, 0)),
                // Nothing explains the record: blame the blocks whose checks
                // fired.
                None => e >> (16 + 2 * b) & 0b11 != 0 || e >> (20 + 2 * b) & 0b11 != 0,
            };
            let guess = best.map_or(0, |(_, h)| h);
            let (syn, logical) = self.judge(block_word(e ^ guess, b));
            flag |= syn;
            let logical = if syn && !matches!(self.kind, GadgetKind::Meas(_)) {
                // Unexplained residue: clear it on d0.
                let w = block_word(e ^ guess, b);
                let (x, z) = (w & 0xf, w >> 4);
                let fix = (x.count_ones() & 1) as u8 | ((z.count_ones() & 1) as u8) << 4;
                self.judge(w ^ fix).1
            } else {
                logical
            };
            match self.kind {
                GadgetKind::Cnot { .. } | GadgetKind::Swap => out |= logical << (2 * b) | (flag as u8) << (4 + b),
                GadgetKind::Meas(_) => out |= logical | (flag as u8) << 1,
                _ => out |= logical | (flag as u8) << 2,
            }
        }
        out
    }
}

/// Runs one gadget with clean inputs and returns its outcome code.
pub fn run_gadget(g: &Gadget, s: &mut impl Sampler) -> u8 {
    Model::new(g).run(s)
}

const CHUNK: u64 = 1 << 14;

fn mix(seed: u64, a: u64, b: u64) -> u64 {
    let mut z = seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Outcome histogram of `trials` runs. Chunks use their own RNG streams, so
/// the result does not depend on the number of worker threads.
fn histogram(g: &Gadget, below: Option<&LevelStats>, rates: &LogicalRates, trials: u64, seed: u64) -> Vec<u64> {
    let chunks = trials.div_ceil(CHUNK);
    let model = Model::new(g);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let n = CHUNK.min(trials - c * CHUNK);
            let rng = trial_rng(seed, c);
            let mut h = vec![0u64; 64];
            match below {
                None => {
                    let mut s = PhysicalSampler { rates, rng };
                    for _ in 0..n {
                        h[model.run(&mut s) as usize] += 1;
                    }
                }
                Some(b) => {
                    let mut s = EffectiveSampler { below: b, rng };
                    for _ in 0..n {
                        h[model.run(&mut s) as usize] += 1;
                    }
                }
            }
            h
        })
        .reduce(
            || vec![0u64; 64],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        )
}

/// Outcome statistics of every level up to `max_level`. Only the
/// left-control CNOT is simulated at the top level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hierarchy {
    pub rates: LogicalRates,
    pub trials: u64,
    pub seed: u64,
    pub levels: Vec<LevelStats>,
}

pub const TOP_KIND: GadgetKind = GadgetKind::Cnot { control_left: true };

pub fn build_hierarchy(
    rates: &LogicalRates,
    max_level: usize,
    trials: u64,
    seed: u64,
) -> Result<Hierarchy, RatesError> {
    if !(1..=4).contains(&max_level) {
        return Err(RatesError::Level(max_level));
    }
    let gadgets: Vec<Gadget> = GadgetKind::ALL.iter().map(|&k| Gadget::build(k)).collect();
    let mut levels: Vec<LevelStats> = Vec::new();
    for level in 1..=max_level {
        let below = levels.last();
        let dists = GadgetKind::ALL
            .iter()
            .zip(&gadgets)
            .map(|(&kind, g)| {
                if level == max_level && kind != TOP_KIND {
                    return None;
                }
                let s = mix(seed, level as u64, kind.index() as u64);
                Some(Dist::from_counts(histogram(g, below, rates, trials, s)))
            })
            .collect();
        levels.push(LevelStats { level, dists });
    }
    Ok(Hierarchy {
        rates: *rates,
        trials,
        seed,
        levels,
    })
}

/// Logical CNOT failure estimate at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeEstimate {
    pub n: usize,
    pub p_cnot: f64,
    pub trials: u64,
    pub failures: u64,
    pub p_fail: f64,
    pub stderr: f64,
}

impl Hierarchy {
    /// A trial fails when either output block carries a logical error,
    /// flagged or not.
    pub fn estimate(&self, n: usize) -> GaugeEstimate {
        let d = self.levels[n - 1].dist(TOP_KIND);
        let failures: u64 = d
            .counts
            .iter()
            .enumerate()
            .filter(|(c, _)| c & 0b1111 != 0)
            .map(|(_, &k)| k)
            .sum();
        let p = failures as f64 / d.trials as f64;
        GaugeEstimate {
            n,
            p_cnot: self.rates.p_cnot,
            trials: d.trials,
            failures,
            p_fail: p,
            stderr: (p * (1.0 - p) / d.trials as f64).sqrt(),
        }
    }
}

/// Level-`n` logical CNOT failure rate.
pub fn simulate_gauge_cnot(
    n: usize,
    rates: &LogicalRates,
    trials: u64,
    seed: u64,
) -> Result<GaugeEstimate, RatesError> {
    let h = build_hierarchy(rates, n, trials.max(1), seed)?;
    Ok(h.estimate(n))
}
