//! Core simulation pieces for surface codes on segmented ion chains.

pub mod analysis;
pub mod decoder;
pub mod frame;
pub mod layout;
pub mod matching;
pub mod noise;
pub mod pauli;
pub mod schedule;
pub mod sim;
pub mod stabilizer;

pub use analysis::{
    evaluate, find_threshold, fit_gauge_scaling, fit_scaling, gates_before_failure, per_round_rate, required_segment,
    EmpiricalModel, ScalingFit, ScalingParams,
};
pub use decoder::{build_matching_graph, judge_logical_failure, MatchingGraph, MemoryDecoder, Verdict};
pub use frame::{conjugate, Basis, CliffordGate, PauliFrame};
pub use layout::{build_layout, ChainLayout, ColumnKind, ColumnSpec, LayoutError};
pub use noise::{derive_rates, NoiseParams};
pub use pauli::{Pauli, PauliError, PauliOperator};
pub use schedule::{schedule_round, RoundSchedule, StabKind, StabilizerInfo};
pub use sim::{enumerate_single_faults, inject_fault, run_trial, trial_rng, MemoryCircuit, SyndromeRecord};
pub use stabilizer::{StabilizerError, StabilizerGroup};
