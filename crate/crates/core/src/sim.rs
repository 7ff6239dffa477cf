//! Pauli-frame Monte Carlo over repeated stabiliser rounds.
//!
//! A round is compiled once into a flat instruction list plus the fault
//! channels attached to it. Trials draw the fired channels by geometric
//! skipping within each rate class, so cost scales with the number of
//! faults rather than the number of locations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::frame::{Basis, PauliFrame};
use crate::layout::ChainLayout;
use crate::noise::{Channel, NoiseParams};
use crate::pauli::{Pauli, PauliOperator};
use crate::schedule::{OpKind, RoundSchedule, StabKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("rounds must be at least 1")]
    NoRounds,
    #[error("fault location round {round} step {step} is outside the circuit")]
    BadLocation { round: usize, step: usize },
    #[error("qubit {0} out of range")]
    BadQubit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Instr {
    Cnot(u32, u32),
    H(u32),
    Reset(u32),
    Measure { q: u32, basis: Basis, rec: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Placed {
    /// The fault acts just before instruction `pos` of the round.
    pos: u32,
    channel: Channel,
}

/// `(round, position, Paulis)` of a fault that fired.
type FiredFault = (u32, u32, [(usize, Pauli); 2]);

#[derive(Debug, Clone)]
struct RateClass {
    rate: f64,
    members: Vec<u32>,
}

/// A fault with a fixed location: applied before instruction `pos` of
/// noisy round `round`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fault {
    pub round: usize,
    pub pos: usize,
    pub paulis: Vec<(usize, Pauli)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    /// Detection events of X-type stabilisers, as `round * nx + local`.
    pub x_events: Vec<u32>,
    /// Detection events of Z-type stabilisers, as `round * nz + local`.
    pub z_events: Vec<u32>,
    /// Residual error after the final noiseless round.
    pub frame: PauliOperator,
}

/// Memory experiment: `rounds` noisy rounds then one noiseless round.
#[derive(Debug, Clone)]
pub struct MemoryCircuit {
    num_qubits: usize,
    instrs: Vec<Instr>,
    step_start: Vec<u32>,
    channels: Vec<Placed>,
    classes: Vec<RateClass>,
    meas_count: usize,
    /// Per stabiliser: kind, local index within kind, measurement records.
    stab_records: Vec<(StabKind, u32, Vec<u32>)>,
    x_supports: Vec<Vec<usize>>,
    z_supports: Vec<Vec<usize>>,
    x_stab_ids: Vec<usize>,
    z_stab_ids: Vec<usize>,
    logical_x_support: Vec<usize>,
    logical_z_support: Vec<usize>,
    pub noise: NoiseParams,
}

impl MemoryCircuit {
    pub fn new(layout: &ChainLayout, schedule: &RoundSchedule, noise: NoiseParams) -> Self {
        let mut instrs = Vec::new();
        let mut step_start = Vec::with_capacity(schedule.steps.len() + 1);
        let mut channels = Vec::new();
        let mut meas_count = 0u32;
        for step in &schedule.steps {
            step_start.push(instrs.len() as u32);
            for op in &step.ops {
                let here = instrs.len() as u32;
                let q = op.qubits.first().copied().unwrap_or(0) as u32;
                let after = match op.kind {
                    OpKind::Cnot => {
                        instrs.push(Instr::Cnot(op.qubits[0] as u32, op.qubits[1] as u32));
                        true
                    }
                    OpKind::Hadamard => {
                        instrs.push(Instr::H(q));
                        true
                    }
                    OpKind::Init => {
                        instrs.push(Instr::Reset(q));
                        true
                    }
                    OpKind::Measure => {
                        instrs.push(Instr::Measure {
                            q,
                            basis: op.basis.unwrap_or(Basis::Z),
                            rec: meas_count,
                        });
                        meas_count += 1;
                        false
                    }
                    OpKind::Idle | OpKind::ShuttleMove => true,
                };
                let pos = if after { instrs.len() as u32 } else { here };
                for channel in noise.channels(op) {
                    channels.push(Placed { pos, channel });
                }
            }
        }
        step_start.push(instrs.len() as u32);
        // Stable order by position keeps fault application deterministic.
        channels.sort_by_key(|c| c.pos);

        let mut classes: Vec<RateClass> = Vec::new();
        for (i, c) in channels.iter().enumerate() {
            let r = c.channel.rate();
            match classes.iter_mut().find(|k| k.rate == r) {
                Some(k) => k.members.push(i as u32),
                None => classes.push(RateClass {
                    rate: r,
                    members: vec![i as u32],
                }),
            }
        }

        let mut stab_records = Vec::new();
        let (mut x_supports, mut z_supports) = (Vec::new(), Vec::new());
        let (mut x_stab_ids, mut z_stab_ids) = (Vec::new(), Vec::new());
        for st in &schedule.stabilizers {
            let (lo, hi) = (
                step_start[st.measure_step] as usize,
                step_start[st.measure_step + 1] as usize,
            );
            let recs: Vec<u32> = st
                .shuttles
                .iter()
                .map(|&sh| {
                    instrs[lo..hi]
                        .iter()
                        .find_map(|ins| match *ins {
                            Instr::Measure { q, rec, .. } if q as usize == sh => Some(rec),
                            _ => None,
                        })
                        .expect("stabiliser shuttle is measured in its row")
                })
                .collect();
            let local = match st.kind {
                StabKind::X => {
                    x_supports.push(st.data_qubits.clone());
                    x_stab_ids.push(st.id);
                    x_supports.len() - 1
                }
                StabKind::Z => {
                    z_supports.push(st.data_qubits.clone());
                    z_stab_ids.push(st.id);
                    z_supports.len() - 1
                }
            };
            stab_records.push((st.kind, local as u32, recs));
        }
        Self {
            num_qubits: layout.num_qubits,
            instrs,
            step_start,
            channels,
            classes,
            meas_count: meas_count as usize,
            stab_records,
            x_supports,
            z_supports,
            x_stab_ids,
            z_stab_ids,
            logical_x_support: layout.logical_x_support(0),
            logical_z_support: layout.logical_z_support(0),
            noise,
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_x_stabilizers(&self) -> usize {
        self.x_supports.len()
    }

    pub fn num_z_stabilizers(&self) -> usize {
        self.z_supports.len()
    }

    pub fn x_supports(&self) -> &[Vec<usize>] {
        &self.x_supports
    }

    pub fn z_supports(&self) -> &[Vec<usize>] {
        &self.z_supports
    }

    /// Schedule ids of the X-type (or Z-type) stabilisers, in local order.
    pub fn stab_ids(&self, kind: StabKind) -> &[usize] {
        match kind {
            StabKind::X => &self.x_stab_ids,
            StabKind::Z => &self.z_stab_ids,
        }
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn instructions_per_round(&self) -> usize {
        self.instrs.len()
    }

    /// Position of step boundary `step` (before step `step`) in a round.
    pub fn step_position(&self, step: usize) -> Option<usize> {
        self.step_start.get(step).map(|&p| p as usize)
    }

    /// `(position, channel)` for every fault mechanism of one round.
    pub fn channels(&self) -> impl Iterator<Item = (usize, &Channel)> {
        self.channels.iter().map(|c| (c.pos as usize, &c.channel))
    }

    /// Whether the residual flips the logical state: Z-type (phase) and
    /// X-type (bit) failures respectively.
    pub fn logical_flips(&self, residual: &PauliOperator) -> (bool, bool) {
        let phase = self
            .logical_x_support
            .iter()
            .fold(false, |acc, &q| acc ^ residual.z_bit(q));
        let bit = self
            .logical_z_support
            .iter()
            .fold(false, |acc, &q| acc ^ residual.x_bit(q));
        (phase, bit)
    }

    /// Samples one trial with fresh faults.
    pub fn sample<R: Rng + ?Sized>(&self, rounds: usize, rng: &mut R) -> TrialOutcome {
        let faults = self.sample_faults(rounds, rng);
        self.execute(rounds, &faults, 0, 0)
    }

    fn sample_faults<R: Rng + ?Sized>(&self, rounds: usize, rng: &mut R) -> Vec<FiredFault> {
        let mut fired: Vec<(u32, u32)> = Vec::new();
        for class in &self.classes {
            let m = class.members.len();
            let total = m * rounds;
            let ln_q = (-class.rate).ln_1p();
            let mut i = 0usize;
            while i < total {
                if class.rate < 1.0 {
                    let u: f64 = rng.gen();
                    let skip = ((1.0 - u).ln() / ln_q).floor();
                    if skip >= (total - i) as f64 {
                        break;
                    }
                    i += skip as usize;
                }
                let (r, k) = (i / m, i % m);
                fired.push((r as u32, class.members[k]));
                i += 1;
            }
        }
        // Channel indices are sorted by position, so this orders by time.
        fired.sort_unstable();
        fired
            .into_iter()
            .map(|(r, c)| {
                let placed = &self.channels[c as usize];
                (r, placed.pos, placed.channel.sample_fired(rng))
            })
            .collect()
    }

    /// Runs with an explicit fault list (any order).
    pub fn run_with_faults(&self, rounds: usize, faults: &[Fault]) -> TrialOutcome {
        let mut list: Vec<FiredFault> = Vec::new();
        for f in faults {
            for chunk in f.paulis.chunks(2) {
                let mut pair = [(0usize, Pauli::I); 2];
                for (slot, &t) in pair.iter_mut().zip(chunk) {
                    *slot = t;
                }
                list.push((f.round as u32, f.pos as u32, pair));
            }
        }
        list.sort_by_key(|t| (t.0, t.1));
        self.execute(rounds, &list, 0, 0)
    }

    /// Propagates one fault starting from its own position with a clean
    /// frame; earlier measurements are all trivially unflipped.
    pub fn propagate_single(&self, rounds: usize, fault: &Fault) -> TrialOutcome {
        let mut pair = [(0usize, Pauli::I); 2];
        for (slot, &t) in pair.iter_mut().zip(&fault.paulis) {
            *slot = t;
        }
        self.execute(
            rounds,
            &[(fault.round as u32, fault.pos as u32, pair)],
            fault.round,
            fault.pos,
        )
    }

    fn execute(&self, rounds: usize, faults: &[FiredFault], start_round: usize, start_pos: usize) -> TrialOutcome {
        let nx = self.x_supports.len();
        let nz = self.z_supports.len();
        let mut frame = PauliFrame::new(self.num_qubits);
        let mut recs = vec![false; self.meas_count];
        let mut prev_x = vec![false; nx];
        let mut prev_z = vec![false; nz];
        let mut x_events = Vec::new();
        let mut z_events = Vec::new();
        let mut fi = 0usize;
        let ninstr = self.instrs.len();
        for r in start_round..rounds {
            recs.iter_mut().for_each(|b| *b = false);
            let first = if r == start_round { start_pos } else { 0 };
            for pos in first..=ninstr {
                while fi < faults.len() && faults[fi].0 as usize == r && faults[fi].1 as usize == pos {
                    for &(q, p) in &faults[fi].2 {
                        frame.apply_pauli(q, p);
                    }
                    fi += 1;
                }
                if pos == ninstr {
                    break;
                }
                match self.instrs[pos] {
                    Instr::Cnot(c, t) => frame.cnot(c as usize, t as usize),
                    Instr::H(q) => frame.hadamard(q as usize),
                    Instr::Reset(q) => frame.reset(q as usize),
                    Instr::Measure { q, basis, rec } => recs[rec as usize] = frame.measurement_flip(q as usize, basis),
                }
            }
            for (kind, local, rs) in &self.stab_records {
                let v = rs.iter().fold(false, |a, &k| a ^ recs[k as usize]);
                let (prev, events, n) = match kind {
                    StabKind::X => (&mut prev_x, &mut x_events, nx),
                    StabKind::Z => (&mut prev_z, &mut z_events, nz),
                };
                let l = *local as usize;
                if v != prev[l] {
                    events.push((r * n + l) as u32);
                }
                prev[l] = v;
            }
        }
        let op = frame.into_operator();
        for (l, sup) in self.x_supports.iter().enumerate() {
            let v = sup.iter().fold(false, |a, &q| a ^ op.z_bit(q));
            if v != prev_x[l] {
                x_events.push((rounds * nx + l) as u32);
            }
        }
        for (l, sup) in self.z_supports.iter().enumerate() {
            let v = sup.iter().fold(false, |a, &q| a ^ op.x_bit(q));
            if v != prev_z[l] {
                z_events.push((rounds * nz + l) as u32);
            }
        }
        x_events.sort_unstable();
        z_events.sort_unstable();
        TrialOutcome {
            x_events,
            z_events,
            frame: op,
        }
    }
}

/// Per-trial RNG: a ChaCha stream keyed by the master seed and selected by
/// the trial index, so results do not depend on scheduling.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SyndromeRecord {
    pub trial_id: u64,
    pub rounds: usize,
    /// `(stabiliser id, round)`; round `rounds` is the noiseless one.
    pub detection_events: Vec<(usize, usize)>,
    pub final_frame: PauliOperator,
    /// Stabiliser values of the noiseless final round, by stabiliser id.
    pub boundary_outcomes: Vec<bool>,
}

impl SyndromeRecord {
    fn from_outcome(c: &MemoryCircuit, trial_id: u64, rounds: usize, o: TrialOutcome) -> Self {
        let nx = c.num_x_stabilizers();
        let nz = c.num_z_stabilizers();
        let mut ev: Vec<(usize, usize)> = o
            .x_events
            .iter()
            .map(|&e| (c.x_stab_ids[e as usize % nx], e as usize / nx))
            .chain(
                o.z_events
                    .iter()
                    .map(|&e| (c.z_stab_ids[e as usize % nz], e as usize / nz)),
            )
            .collect();
        ev.sort_unstable_by_key(|&(s, r)| (r, s));
        let mut boundary = vec![false; nx + nz];
        for (l, sup) in c.x_supports.iter().enumerate() {
            boundary[c.x_stab_ids[l]] = sup.iter().fold(false, |a, &q| a ^ o.frame.z_bit(q));
        }
        for (l, sup) in c.z_supports.iter().enumerate() {
            boundary[c.z_stab_ids[l]] = sup.iter().fold(false, |a, &q| a ^ o.frame.x_bit(q));
        }
        Self {
            trial_id,
            rounds,
            detection_events: ev,
            final_frame: o.frame,
            boundary_outcomes: boundary,
        }
    }
}

/// One full memory trial; deterministic in `(seed, trial_id)`.
pub fn run_trial(
    layout: &ChainLayout,
    schedule: &RoundSchedule,
    noise: &NoiseParams,
    rounds: usize,
    seed: u64,
    trial_id: u64,
) -> Result<SyndromeRecord, SimError> {
    if rounds == 0 {
        return Err(SimError::NoRounds);
    }
    let c = MemoryCircuit::new(layout, schedule, *noise);
    let mut rng = trial_rng(seed, trial_id);
    let o = c.sample(rounds, &mut rng);
    Ok(SyndromeRecord::from_outcome(&c, trial_id, rounds, o))
}

/// Where a deterministic fault is placed: at the end of `step` of noisy
/// round `round` (equivalently, just before step `step + 1`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultLocation {
    pub round: usize,
    pub step: usize,
}

/// Noiseless run with a single injected Pauli.
pub fn inject_fault(
    layout: &ChainLayout,
    schedule: &RoundSchedule,
    rounds: usize,
    location: &FaultLocation,
    pauli: &PauliOperator,
) -> Result<SyndromeRecord, SimError> {
    if rounds == 0 {
        return Err(SimError::NoRounds);
    }
    if location.round >= rounds || location.step >= schedule.step_count {
        return Err(SimError::BadLocation {
            round: location.round,
            step: location.step,
        });
    }
    if pauli.num_qubits() != layout.num_qubits {
        return Err(SimError::BadQubit(pauli.num_qubits()));
    }
    let d = layout.d();
    let c = MemoryCircuit::new(layout, schedule, NoiseParams::noiseless(d));
    let pos = c.step_position(location.step + 1).expect("step in range");
    let fault = Fault {
        round: location.round,
        pos,
        paulis: pauli.terms(),
    };
    let o = c.run_with_faults(rounds, &[fault]);
    Ok(SyndromeRecord::from_outcome(&c, 0, rounds, o))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleFault {
    pub round: usize,
    pub pos: usize,
    pub channel: usize,
    pub paulis: Vec<(usize, Pauli)>,
    pub probability: f64,
    pub x_events: Vec<u32>,
    pub z_events: Vec<u32>,
    pub residual: PauliOperator,
}

/// Every (fault location x non-identity Pauli) of `rounds` noisy rounds,
/// with its detection-event signature and residual data error.
pub fn enumerate_single_faults(circuit: &MemoryCircuit, rounds: usize) -> Vec<SingleFault> {
    let mut out = Vec::new();
    for r in 0..rounds {
        for (ci, (pos, ch)) in circuit.channels().enumerate() {
            for (paulis, p) in ch.outcomes() {
                let f = Fault {
                    round: r,
                    pos,
                    paulis: paulis.clone(),
                };
                let o = circuit.propagate_single(rounds, &f);
                out.push(SingleFault {
                    round: r,
                    pos,
                    channel: ci,
                    paulis,
                    probability: p,
                    x_events: o.x_events,
                    z_events: o.z_events,
                    residual: o.frame,
                });
            }
        }
    }
    out
}
