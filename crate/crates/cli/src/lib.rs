//! Sweeps, checks and reports for surface codes on segmented chains and the
//! gauge code stacked on top of them.

pub mod analyze;
pub mod decode_check;
pub mod gauge_sweep;
pub mod grid;
pub mod output;
pub mod protocols;
pub mod resources;
pub mod surface;

pub use output::{CliError, Result};
