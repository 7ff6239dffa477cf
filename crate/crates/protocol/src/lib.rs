//! Lattice deformation on a chain of segments: logical CNOT, Hadamard and
//! state transfer, checked in the stabiliser formalism.

pub mod distance;
pub mod lattice;
pub mod protocols;
pub mod step;

pub use distance::{audit_distance, DistanceAudit, DistanceError};
pub use lattice::{Column, Frame, Role, Side, Sides};
pub use protocols::{
    cnot_protocol, hadamard_protocol, round_trip_protocol, run_protocol, state_transfer_protocol, verify, verify_cnot,
    verify_hadamard, verify_state_transfer, Direction, Expected, MapEntry, Mutation, Protocol, Region, StepReport,
    VerificationReport,
};
pub use step::{apply_step, DeformationStep, ProtocolError, ProtocolState};
