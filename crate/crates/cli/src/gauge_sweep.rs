//! Level curves of the concatenated gauge code over p_CNOT.

use std::path::Path;

use qsegsim_gauge::{build_hierarchy, LogicalRates};
use serde::{Deserialize, Serialize};

use crate::output::{guarded, hash_of, point_seed, read_existing, write_csv, CliError, Result, SCHEMA, VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeConfig {
    pub levels: usize,
    pub p_cnot: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    /// Surface-code distance used to split p_CNOT into per-round rates.
    pub d: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeRow {
    pub n: usize,
    #[serde(rename = "p_CNOT")]
    pub p_cnot: f64,
    pub trials: u64,
    pub failures: u64,
    #[serde(rename = "P_CNOT")]
    pub p_fail: f64,
    pub stderr: f64,
    pub point_hash: String,
}

#[derive(Serialize)]
struct PointKey<'a> {
    schema: u32,
    version: &'a str,
    seed: u64,
    levels: usize,
    p_cnot: f64,
    d: usize,
    trials: u64,
}

impl GaugeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=4).contains(&self.levels) {
            return Err(CliError::Config(format!("levels {} outside 1..=4", self.levels)));
        }
        if self.p_cnot.is_empty() {
            return Err(CliError::Config("empty grid".into()));
        }
        if self.trials == 0 {
            return Err(CliError::Config("trials must be positive".into()));
        }
        for &p in &self.p_cnot {
            LogicalRates::from_p_cnot(p, self.d).map_err(|e| CliError::Config(format!("p_CNOT {p}: {e}")))?;
        }
        Ok(())
    }

    pub fn point_hash(&self, p: f64) -> String {
        hash_of(&PointKey {
            schema: SCHEMA,
            version: VERSION,
            seed: self.seed,
            levels: self.levels,
            p_cnot: p,
            d: self.d,
            trials: self.trials,
        })
    }

    pub fn preamble(&self) -> Vec<String> {
        vec![
            format!("qsegsim {VERSION} gauge-sweep schema {SCHEMA}"),
            format!("config_hash {}", hash_of(self)),
            format!("seed {}", self.seed),
            format!(
                "noise depolarising logical gates; p_L=p_CNOT/(14d) d={}; p_IM=p0=d p_L; p_SWAP=3 p_CNOT; memory 4 p0 per CNOT, 12 p0 per SWAP",
                self.d
            ),
            "conventions: one CNOT exRec per trial; failure = logical error on either output block, flagged or not; the same trials feed every level".into(),
        ]
    }
}

/// One row per level for the point at `p`.
pub fn simulate_point(cfg: &GaugeConfig, p: f64, hash: &str) -> Result<Vec<GaugeRow>> {
    let rates = LogicalRates::from_p_cnot(p, cfg.d).map_err(|e| CliError::Config(e.to_string()))?;
    let h = build_hierarchy(&rates, cfg.levels, cfg.trials, point_seed(cfg.seed, hash))
        .map_err(|e| CliError::Simulation(e.to_string()))?;
    Ok((1..=cfg.levels)
        .map(|n| {
            let e = h.estimate(n);
            GaugeRow {
                n,
                p_cnot: p,
                trials: e.trials,
                failures: e.failures,
                p_fail: e.p_fail,
                stderr: e.stderr,
                point_hash: hash.to_string(),
            }
        })
        .collect())
}

fn sorted(mut rows: Vec<GaugeRow>) -> Vec<GaugeRow> {
    rows.sort_by(|a, b| a.n.cmp(&b.n).then(a.p_cnot.total_cmp(&b.p_cnot)));
    rows
}

/// Runs every p not already in `out`; rows are grouped by level.
pub fn run(cfg: &GaugeConfig, out: &Path, mut progress: impl FnMut(&[GaugeRow])) -> Result<Vec<GaugeRow>> {
    cfg.validate()?;
    let old: Vec<GaugeRow> = read_existing(out)?;
    let preamble = cfg.preamble();
    let mut rows: Vec<GaugeRow> = Vec::new();
    for &p in &cfg.p_cnot {
        let hash = cfg.point_hash(p);
        let done: Vec<GaugeRow> = old.iter().filter(|r| r.point_hash == hash).cloned().collect();
        if done.len() == cfg.levels {
            rows.extend(done);
            continue;
        }
        let new = guarded(&format!("p_CNOT={p}"), || simulate_point(cfg, p, &hash))?;
        progress(&new);
        rows.extend(new);
        rows = sorted(rows);
        write_csv(out, &preamble, &rows)?;
    }
    let rows = sorted(rows);
    write_csv(out, &preamble, &rows)?;
    Ok(rows)
}
