//! Threshold, scaling and gauge-level fits over sweep results.

use std::path::PathBuf;

use qsegsim_core::analysis::{GaugeFit, GaugeScaling, GridPoint, ScalingFit, Threshold, TABLE_I, TABLE_II};
use qsegsim_core::{find_threshold, fit_gauge_scaling, fit_scaling};
use serde::{Deserialize, Serialize};

use crate::gauge_sweep::GaugeRow;
use crate::output::{hash_of, read_csv, Result, SCHEMA, VERSION};
use crate::surface::SurfaceRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Channel {
    /// Logical phase errors, detected by X stabilisers.
    Z,
    X,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeConfig {
    pub surface: Vec<PathBuf>,
    pub gauge: Vec<PathBuf>,
    pub channel: Channel,
    pub threshold_window: (f64, f64),
    pub fit_window: (f64, f64),
    /// Fewest failures a point needs to enter the scaling fit.
    pub min_failures: u64,
    /// Gauge points above this rate sit near saturation and are left out.
    pub gauge_max_p: f64,
    pub gauge_min_failures: u64,
    pub bootstrap: usize,
    pub seed: u64,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        Self {
            surface: Vec::new(),
            gauge: Vec::new(),
            channel: Channel::Z,
            threshold_window: (0.004, 0.012),
            fit_window: (0.001, 0.004),
            min_failures: 50,
            gauge_max_p: 0.1,
            gauge_min_failures: 50,
            bootstrap: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub fit: ScalingFit,
    /// Largest ratio between model and measurement, either way round.
    pub max_ratio: f64,
    pub threshold_from_fit: f64,
    pub published: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelFit {
    pub n: usize,
    pub fit: GaugeFit,
    pub p_range: (f64, f64),
    pub published: GaugeScaling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub lower: usize,
    pub upper: usize,
    pub p_cnot: Option<f64>,
    pub published: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub schema: u32,
    pub config_hash: String,
    pub config: AnalyzeConfig,
    pub threshold: Option<Threshold>,
    pub threshold_error: Option<String>,
    pub scaling: Option<ScalingReport>,
    pub scaling_error: Option<String>,
    pub gauge_levels: Vec<LevelFit>,
    pub gauge_errors: Vec<(usize, String)>,
    pub crossings: Vec<Crossing>,
}

fn grid_point(r: &SurfaceRow, ch: Channel) -> (GridPoint, u64) {
    let (p_l, stderr, f) = match ch {
        Channel::Z => (r.p_l_z, r.stderr_z, r.failures_z),
        Channel::X => (r.p_l_x, r.stderr_x, r.failures_x),
    };
    (
        GridPoint {
            eps2: r.eps2,
            d: r.d,
            p_l,
            stderr,
        },
        f,
    )
}

fn inside(x: f64, w: (f64, f64)) -> bool {
    x >= w.0 * (1.0 - 1e-9) && x <= w.1 * (1.0 + 1e-9)
}

pub fn threshold(rows: &[SurfaceRow], cfg: &AnalyzeConfig) -> std::result::Result<Threshold, String> {
    let pts: Vec<GridPoint> = rows
        .iter()
        .filter(|r| inside(r.eps2, cfg.threshold_window))
        .map(|r| grid_point(r, cfg.channel).0)
        .collect();
    find_threshold(&pts, cfg.bootstrap, cfg.seed).map_err(|e| e.to_string())
}

pub fn scaling(rows: &[SurfaceRow], cfg: &AnalyzeConfig) -> std::result::Result<ScalingReport, String> {
    let pts: Vec<GridPoint> = rows
        .iter()
        .filter(|r| inside(r.eps2, cfg.fit_window))
        .map(|r| grid_point(r, cfg.channel))
        .filter(|(_, f)| *f >= cfg.min_failures)
        .map(|(p, _)| p)
        .collect();
    let fit = fit_scaling(&pts).map_err(|e| e.to_string())?;
    let max_ratio = fit.residuals.iter().map(|r| r.abs().exp()).fold(1.0, f64::max);
    Ok(ScalingReport {
        threshold_from_fit: fit.params.threshold(),
        max_ratio,
        fit,
        published: [TABLE_I.alpha, TABLE_I.beta, TABLE_I.gamma, TABLE_I.delta],
    })
}

/// Points of level `n` that carry information: enough failures and clear
/// of saturation.
pub fn level_points(rows: &[GaugeRow], n: usize, cfg: &AnalyzeConfig) -> Vec<(f64, f64, f64)> {
    rows.iter()
        .filter(|r| r.n == n && r.failures >= cfg.gauge_min_failures && r.p_fail <= cfg.gauge_max_p)
        .map(|r| (r.p_cnot, r.p_fail, r.stderr))
        .collect()
}

pub fn gauge_fits(rows: &[GaugeRow], cfg: &AnalyzeConfig) -> (Vec<LevelFit>, Vec<(usize, String)>) {
    let mut fits = Vec::new();
    let mut errors = Vec::new();
    let top = rows.iter().map(|r| r.n).max().unwrap_or(0);
    for n in 1..=top {
        let pts = level_points(rows, n, cfg);
        match fit_gauge_scaling(&pts) {
            Ok(fit) => {
                let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
                let hi = pts.iter().map(|p| p.0).fold(0.0, f64::max);
                fits.push(LevelFit {
                    n,
                    fit,
                    p_range: (lo, hi),
                    published: TABLE_II[n - 1],
                });
            }
            Err(e) => errors.push((n, e.to_string())),
        }
    }
    (fits, errors)
}

pub fn crossings(fits: &[LevelFit]) -> Vec<Crossing> {
    fits.windows(2)
        .filter(|w| w[1].n == w[0].n + 1 && w[0].n >= 2)
        .map(|w| Crossing {
            lower: w[0].n,
            upper: w[1].n,
            p_cnot: w[0].fit.params.crossing(&w[1].fit.params),
            published: TABLE_II[w[0].n - 1].crossing(&TABLE_II[w[1].n - 1]),
        })
        .collect()
}

/// Rows of every surface file; where files overlap the point with the most
/// trials wins.
pub fn load_surface(cfg: &AnalyzeConfig) -> Result<Vec<SurfaceRow>> {
    let mut rows: Vec<SurfaceRow> = Vec::new();
    for p in &cfg.surface {
        for r in read_csv::<SurfaceRow>(p)? {
            match rows.iter_mut().find(|o| o.d == r.d && o.eps2 == r.eps2) {
                Some(o) if o.trials < r.trials => *o = r,
                Some(_) => {}
                None => rows.push(r),
            }
        }
    }
    Ok(rows)
}

pub fn load_gauge(cfg: &AnalyzeConfig) -> Result<Vec<GaugeRow>> {
    let mut rows = Vec::new();
    for p in &cfg.gauge {
        rows.extend(read_csv::<GaugeRow>(p)?);
    }
    Ok(rows)
}

pub fn analyze(cfg: &AnalyzeConfig) -> Result<Report> {
    let surface = load_surface(cfg)?;
    let gauge = load_gauge(cfg)?;
    let (threshold, threshold_error) = if surface.is_empty() {
        (None, None)
    } else {
        match threshold(&surface, cfg) {
            Ok(t) => (Some(t), None),
            Err(e) => (None, Some(e)),
        }
    };
    let (scaling, scaling_error) = if surface.is_empty() {
        (None, None)
    } else {
        match scaling(&surface, cfg) {
            Ok(s) => (Some(s), None),
            Err(e) => (None, Some(e)),
        }
    };
    let (gauge_levels, gauge_errors) = gauge_fits(&gauge, cfg);
    let crossings = crossings(&gauge_levels);
    Ok(Report {
        version: VERSION.into(),
        schema: SCHEMA,
        config_hash: hash_of(cfg),
        config: cfg.clone(),
        threshold,
        threshold_error,
        scaling,
        scaling_error,
        gauge_levels,
        gauge_errors,
        crossings,
    })
}
