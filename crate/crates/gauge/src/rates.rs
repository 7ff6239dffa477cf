//! Error rates of surface-code logical operations and gauge-code sizes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Blocks of `d` rounds in one lattice-surgery CNOT.
pub const CNOT_BLOCKS: f64 = 14.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RatesError {
    #[error("logical error rate {0} outside [0, 1]")]
    OutOfRange(f64),
    #[error("derived rate {name} = {value} exceeds 1")]
    Saturated { name: &'static str, value: f64 },
    #[error("code distance must be positive")]
    ZeroDistance,
    #[error("concatenation level {0} outside 1..=4")]
    Level(usize),
}

/// Rates of the operations the gauge code is built from, all derived from
/// the per-round logical error rate `p_l` and the distance `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogicalRates {
    pub p_l: f64,
    pub d: usize,
    /// Initialisation or measurement.
    pub p_im: f64,
    pub p_cnot: f64,
    pub p_swap: f64,
    /// Memory error over one initialisation or measurement.
    pub p0: f64,
}

impl LogicalRates {
    pub fn new(p_l: f64, d: usize) -> Result<Self, RatesError> {
        if d == 0 {
            return Err(RatesError::ZeroDistance);
        }
        if !(0.0..=1.0).contains(&p_l) {
            return Err(RatesError::OutOfRange(p_l));
        }
        let df = d as f64;
        let r = Self {
            p_l,
            d,
            p_im: df * p_l,
            p_cnot: CNOT_BLOCKS * df * p_l,
            p_swap: 3.0 * CNOT_BLOCKS * df * p_l,
            p0: df * p_l,
        };
        for (name, value) in [
            ("p_im", r.p_im),
            ("p_cnot", r.p_cnot),
            ("p_swap", r.p_swap),
            ("memory", r.memory_swap()),
        ] {
            if value > 1.0 {
                return Err(RatesError::Saturated { name, value });
            }
        }
        Ok(r)
    }

    /// Rates giving the surface-code CNOT error `p_cnot`.
    pub fn from_p_cnot(p_cnot: f64, d: usize) -> Result<Self, RatesError> {
        if d == 0 {
            return Err(RatesError::ZeroDistance);
        }
        Self::new(p_cnot / (CNOT_BLOCKS * d as f64), d)
    }

    pub fn zero(d: usize) -> Self {
        Self::new(0.0, d.max(1)).expect("zero rates are valid")
    }

    pub fn memory_short(&self) -> f64 {
        self.p0
    }

    /// Memory error while a CNOT runs elsewhere.
    pub fn memory_cnot(&self) -> f64 {
        4.0 * self.p0
    }

    pub fn memory_swap(&self) -> f64 {
        12.0 * self.p0
    }
}

/// Size bookkeeping for level `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaugeConfig {
    pub level: usize,
}

impl GaugeConfig {
    pub fn new(level: usize) -> Result<Self, RatesError> {
        if !(1..=4).contains(&level) {
            return Err(RatesError::Level(level));
        }
        Ok(Self { level })
    }

    pub fn distance(&self) -> usize {
        1 << self.level
    }

    /// Surface-code qubits per block: four data and two ancilla units per level.
    pub fn block_size(&self) -> usize {
        6usize.pow(self.level as u32)
    }

    /// Surface-code patches per block when only one in four carries information.
    pub fn surface_patches(&self) -> usize {
        4 * self.block_size()
    }
}
