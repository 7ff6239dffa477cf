//! Memory sweeps of a single surface-code patch over (d, eps2).

use std::path::Path;

use qsegsim_core::{build_layout, derive_rates, per_round_rate, schedule_round, trial_rng, MemoryDecoder};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::output::{guarded, hash_of, point_seed, read_existing, write_csv, CliError, Result, SCHEMA, VERSION};

/// Trials handed to one task.
const CHUNK: u64 = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceConfig {
    pub ds: Vec<usize>,
    pub eps2: Vec<f64>,
    /// Noisy rounds per trial; `None` means `rounds_per_d * d`.
    pub rounds: Option<usize>,
    pub rounds_per_d: usize,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceRow {
    pub d: usize,
    pub s: usize,
    pub eps2: f64,
    pub rounds: usize,
    pub trials: u64,
    #[serde(rename = "failures_Z")]
    pub failures_z: u64,
    #[serde(rename = "failures_X")]
    pub failures_x: u64,
    #[serde(rename = "p_L_Z")]
    pub p_l_z: f64,
    #[serde(rename = "p_L_X")]
    pub p_l_x: f64,
    #[serde(rename = "stderr_Z")]
    pub stderr_z: f64,
    #[serde(rename = "stderr_X")]
    pub stderr_x: f64,
    pub point_hash: String,
}

#[derive(Serialize)]
struct PointKey<'a> {
    schema: u32,
    version: &'a str,
    seed: u64,
    d: usize,
    eps2: f64,
    rounds: usize,
    trials: u64,
}

impl SurfaceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ds.is_empty() || self.eps2.is_empty() {
            return Err(CliError::Config("empty grid".into()));
        }
        if let Some(&d) = self.ds.iter().find(|&&d| d < 3) {
            return Err(CliError::Config(format!("distance {d} is below 3")));
        }
        if let Some(&e) = self.eps2.iter().find(|&&e| !(0.0..0.5).contains(&e)) {
            return Err(CliError::Config(format!("eps2 {e} outside [0, 0.5)")));
        }
        if self.trials == 0 {
            return Err(CliError::Config("trials must be positive".into()));
        }
        if self.rounds == Some(0) || self.rounds_per_d == 0 {
            return Err(CliError::Config("rounds must be positive".into()));
        }
        Ok(())
    }

    pub fn rounds_for(&self, d: usize) -> usize {
        self.rounds.unwrap_or(self.rounds_per_d * d)
    }

    /// Grid points in output order: by d, then eps2.
    pub fn points(&self) -> Vec<(usize, f64, usize, String)> {
        let mut out = Vec::new();
        for &d in &self.ds {
            for &eps2 in &self.eps2 {
                let rounds = self.rounds_for(d);
                let key = PointKey {
                    schema: SCHEMA,
                    version: VERSION,
                    seed: self.seed,
                    d,
                    eps2,
                    rounds,
                    trials: self.trials,
                };
                out.push((d, eps2, rounds, hash_of(&key)));
            }
        }
        out
    }

    pub fn preamble(&self) -> Vec<String> {
        vec![
            format!("qsegsim {VERSION} surface-sweep schema {SCHEMA}"),
            format!("config_hash {}", hash_of(self)),
            format!("seed {}", self.seed),
            "noise eps1=eps2/10 eps_i=eps2 eps_m=eps2 eps0=eps2/(5(2d-1)) s=d+2".into(),
            "conventions: rounds noisy rounds then one noiseless round; p_L per round from P_fail=(1-(1-2p_L)^rounds)/2; Z = logical phase, X = logical bit".into(),
            "saturated points carry p_L=0.5 and stderr=inf".into(),
        ]
    }
}

/// `(phase failures, bit failures)` over `trials` trials of one point.
pub fn simulate_point(d: usize, eps2: f64, rounds: usize, trials: u64, seed: u64) -> Result<(u64, u64)> {
    let layout = build_layout(d + 2, 1).map_err(|e| CliError::Simulation(e.to_string()))?;
    let schedule = schedule_round(&layout);
    let noise = derive_rates(eps2, d).map_err(|e| CliError::Simulation(e.to_string()))?;
    let dec = MemoryDecoder::new(&layout, &schedule, noise, rounds).map_err(|e| CliError::Simulation(e.to_string()))?;
    let chunks = trials.div_ceil(CHUNK);
    Ok((0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut f = (0u64, 0u64);
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let o = dec.circuit.sample(rounds, &mut trial_rng(seed, t));
                let v = dec.judge(&o);
                f.0 += v.phase as u64;
                f.1 += v.bit as u64;
            }
            f
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1)))
}

pub fn make_row(
    d: usize,
    eps2: f64,
    rounds: usize,
    trials: u64,
    fz: u64,
    fx: u64,
    point_hash: String,
) -> Result<SurfaceRow> {
    let rz = per_round_rate(fz, trials, rounds).map_err(|e| CliError::Simulation(e.to_string()))?;
    let rx = per_round_rate(fx, trials, rounds).map_err(|e| CliError::Simulation(e.to_string()))?;
    Ok(SurfaceRow {
        d,
        s: d + 2,
        eps2,
        rounds,
        trials,
        failures_z: fz,
        failures_x: fx,
        p_l_z: rz.p_l,
        p_l_x: rx.p_l,
        stderr_z: rz.stderr,
        stderr_x: rx.stderr,
        point_hash,
    })
}

/// Runs every point not already in `out`, rewriting the file after each.
pub fn run(cfg: &SurfaceConfig, out: &Path, mut progress: impl FnMut(&SurfaceRow)) -> Result<Vec<SurfaceRow>> {
    cfg.validate()?;
    let old: Vec<SurfaceRow> = read_existing(out)?;
    let preamble = cfg.preamble();
    let mut rows: Vec<SurfaceRow> = Vec::new();
    for (d, eps2, rounds, hash) in cfg.points() {
        if let Some(r) = old.iter().find(|r| r.point_hash == hash) {
            rows.push(r.clone());
            continue;
        }
        let label = format!("d={d} eps2={eps2}");
        let seed = point_seed(cfg.seed, &hash);
        let (fz, fx) = guarded(&label, || simulate_point(d, eps2, rounds, cfg.trials, seed))?;
        let row = make_row(d, eps2, rounds, cfg.trials, fz, fx, hash)?;
        progress(&row);
        rows.push(row);
        write_csv(out, &preamble, &rows)?;
    }
    write_csv(out, &preamble, &rows)?;
    Ok(rows)
}
