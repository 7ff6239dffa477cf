//! Concatenated four-qubit gauge code running on surface-code logical
//! qubits in a one-dimensional chain.

pub mod circuit;
pub mod rates;
pub mod sim;

pub use circuit::{build_gauge_circuit, Circuit, EcRound, Gadget, GadgetKind, Op, OpCounts};
pub use rates::{GaugeConfig, LogicalRates, RatesError};
pub use sim::{
    build_hierarchy, run_gadget, simulate_gauge_cnot, Dist, Duration, GaugeEstimate, Hierarchy, Injector, LevelStats,
    Location, Model, Sampler,
};
