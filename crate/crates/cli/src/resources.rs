//! Segment sizes and gate budgets from the fitted scaling laws.

use qsegsim_core::analysis::{gauge_overhead, max_error_rate, GaugeScaling, ScalingParams, TABLE_I, TABLE_II};
use qsegsim_core::{gates_before_failure, required_segment};
use serde::{Deserialize, Serialize};

use crate::output::{hash_of, CliError, Result, SCHEMA, VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub eps2: f64,
    pub target: f64,
    pub expected_s: usize,
    pub s: usize,
    pub s_odd: usize,
    pub d: usize,
    pub p_cnot: f64,
}

/// Quoted segment sizes for two error rates and two CNOT targets.
pub const ANCHORS: [(f64, f64, usize); 4] = [
    (0.0012, 4e-6, 15),
    (0.00012, 4e-6, 7),
    (0.0011, 1e-15, 35),
    (0.00014, 1e-15, 17),
];

pub fn anchors(params: &ScalingParams) -> Result<Vec<Anchor>> {
    ANCHORS
        .iter()
        .map(|&(eps2, target, expected_s)| {
            let r = required_segment(params, eps2, target).map_err(|e| CliError::Simulation(e.to_string()))?;
            Ok(Anchor {
                eps2,
                target,
                expected_s,
                s: r.s,
                s_odd: r.s_odd,
                d: r.d,
                p_cnot: r.p_cnot,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxRatePoint {
    pub s: usize,
    pub eps2_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GatesPoint {
    pub eps2: f64,
    pub s: usize,
    pub level: usize,
    pub gates: f64,
    /// Surface-code patches per logical qubit.
    pub patches: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceConfig {
    pub surface: ScalingParams,
    pub gauge: Vec<GaugeScaling>,
    pub target: f64,
    pub s_range: (usize, usize),
    pub eps2: Vec<f64>,
    pub levels: Vec<usize>,
}

impl Default for ResourceConfig {
    fn default() -> Self {
        Self {
            surface: TABLE_I,
            gauge: TABLE_II.to_vec(),
            target: 4e-6,
            s_range: (5, 41),
            eps2: vec![0.001, 0.0001],
            levels: vec![0, 3, 4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResourceReport {
    pub version: String,
    pub schema: u32,
    pub config_hash: String,
    pub config: ResourceConfig,
    pub pipeline: String,
    pub anchors: Vec<Anchor>,
    pub max_rate: Vec<MaxRatePoint>,
    pub gates: Vec<GatesPoint>,
}

pub fn resource_curves(cfg: &ResourceConfig) -> Result<ResourceReport> {
    if cfg.s_range.0 < 3 || cfg.s_range.1 < cfg.s_range.0 {
        return Err(CliError::Config(format!("bad segment range {:?}", cfg.s_range)));
    }
    let max_rate = (cfg.s_range.0..=cfg.s_range.1)
        .map(|s| MaxRatePoint {
            s,
            eps2_max: max_error_rate(&cfg.surface, s, cfg.target),
        })
        .collect();
    let mut gates = Vec::new();
    for &eps2 in &cfg.eps2 {
        for &level in &cfg.levels {
            for s in cfg.s_range.0..=cfg.s_range.1 {
                let g = gates_before_failure(&cfg.surface, &cfg.gauge, eps2, s, level)
                    .map_err(|e| CliError::Config(e.to_string()))?;
                gates.push(GatesPoint {
                    eps2,
                    s,
                    level,
                    gates: g,
                    patches: if level == 0 { 1 } else { gauge_overhead(level as u32) },
                });
            }
        }
    }
    Ok(ResourceReport {
        version: VERSION.into(),
        schema: SCHEMA,
        config_hash: hash_of(cfg),
        config: cfg.clone(),
        pipeline: "p_CNOT = 14 d p_L(eps2, d) with d = s - 2; level 0 gives 1/p_CNOT, level n gives 1/P_CNOT from the level-n gauge law at that p_CNOT".into(),
        anchors: anchors(&cfg.surface)?,
        max_rate,
        gates,
    })
}
