//! Logical error rate extraction, threshold estimation, scaling fits and
//! resource estimates.

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4, Vector2, Vector4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("{failures} failures exceed {trials} trials")]
    FailuresExceedTrials { failures: u64, trials: u64 },
    #[error("no trials")]
    NoTrials,
    #[error("no threshold in range")]
    NoThreshold,
    #[error("need at least {need} usable points, got {got}")]
    InsufficientPoints { need: usize, got: usize },
    #[error("fit did not converge")]
    NoConvergence,
    #[error("error rate {0} is not below threshold")]
    AboveThreshold(f64),
    #[error("concatenation level {0} has no parameters")]
    UnknownLevel(usize),
}

/// Per-round logical error rate inferred from a trial count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoundRate {
    pub p_l: f64,
    pub stderr: f64,
    /// One-sided 95% bound, set when no failure was seen.
    pub upper_bound: Option<f64>,
    /// The trial failure rate reached 1/2, so `p_l` carries no information.
    pub saturated: bool,
}

fn invert_rounds(p_fail: f64, rounds: usize) -> f64 {
    (1.0 - (1.0 - 2.0 * p_fail).powf(1.0 / rounds as f64)) / 2.0
}

/// Inverts `P_fail = (1 - (1 - 2 p)^rounds) / 2`.
pub fn per_round_rate(failures: u64, trials: u64, rounds: usize) -> Result<RoundRate, AnalysisError> {
    if trials == 0 || rounds == 0 {
        return Err(AnalysisError::NoTrials);
    }
    if failures > trials {
        return Err(AnalysisError::FailuresExceedTrials { failures, trials });
    }
    let n = trials as f64;
    let pf = failures as f64 / n;
    if failures == 0 {
        // Rule of three.
        let up = (3.0 / n).min(0.5);
        return Ok(RoundRate {
            p_l: 0.0,
            stderr: 0.0,
            upper_bound: Some(invert_rounds(up, rounds)),
            saturated: false,
        });
    }
    if pf >= 0.5 {
        return Ok(RoundRate {
            p_l: 0.5,
            stderr: f64::INFINITY,
            upper_bound: None,
            saturated: true,
        });
    }
    let p = invert_rounds(pf, rounds);
    let sf = (pf * (1.0 - pf) / n).sqrt();
    let slope = (1.0 - 2.0 * pf).powf(1.0 / rounds as f64 - 1.0) / rounds as f64;
    Ok(RoundRate {
        p_l: p,
        stderr: sf * slope,
        upper_bound: None,
        saturated: false,
    })
}

/// One measured point of a memory sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub eps2: f64,
    pub d: usize,
    pub p_l: f64,
    pub stderr: f64,
}

impl GridPoint {
    fn usable(&self) -> bool {
        self.p_l > 0.0 && self.p_l < 0.5 && self.stderr.is_finite() && self.stderr > 0.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub eps2_th: f64,
    pub stderr: f64,
    /// Crossing for each successive pair of distances.
    pub crossings: Vec<(usize, usize, f64)>,
}

fn distinct_ds(points: &[GridPoint]) -> Vec<usize> {
    let mut ds: Vec<usize> = points.iter().filter(|p| p.usable()).map(|p| p.d).collect();
    ds.sort_unstable();
    ds.dedup();
    ds
}

/// First eps2 at which the larger distance stops winning, from straight
/// lines in log-log between neighbouring grid points.
fn crossing(lo: &[(f64, f64)], hi: &[(f64, f64)]) -> Option<f64> {
    let mut common = Vec::new();
    for &(x, y) in lo {
        if let Some(&(_, y2)) = hi.iter().find(|(x2, _)| (x2 - x).abs() < 1e-12) {
            common.push((x, y2 - y));
        }
    }
    for w in common.windows(2) {
        let ((x0, f0), (x1, f1)) = (w[0], w[1]);
        if f0 < 0.0 && f1 >= 0.0 {
            let t = f0 / (f0 - f1);
            return Some((x0 + t * (x1 - x0)).exp());
        }
    }
    None
}

/// `(d1, d2, eps2)` where the two curves cross.
type Crossing = (usize, usize, f64);

fn threshold_once(ds: &[usize], curves: &[Vec<(f64, f64)>]) -> Option<(f64, Vec<Crossing>)> {
    let mut found = Vec::new();
    for k in 1..ds.len() {
        if let Some(x) = crossing(&curves[k - 1], &curves[k]) {
            found.push((ds[k - 1], ds[k], x));
        }
    }
    if found.is_empty() {
        return None;
    }
    let mean = found.iter().map(|c| c.2.ln()).sum::<f64>() / found.len() as f64;
    Some((mean.exp(), found))
}

/// Crossing of the `p_L(eps2)` curves of successive distances, averaged in
/// log space, with a parametric bootstrap over the point uncertainties.
pub fn find_threshold(points: &[GridPoint], bootstrap: usize, seed: u64) -> Result<Threshold, AnalysisError> {
    let ds = distinct_ds(points);
    if ds.len() < 2 {
        return Err(AnalysisError::NoThreshold);
    }
    let build = |jitter: &mut dyn FnMut(&GridPoint) -> f64| -> Vec<Vec<(f64, f64)>> {
        ds.iter()
            .map(|&d| {
                let mut c: Vec<(f64, f64)> = points
                    .iter()
                    .filter(|p| p.d == d && p.usable())
                    .map(|p| (p.eps2.ln(), p.p_l.ln() + jitter(p)))
                    .collect();
                c.sort_by(|a, b| a.0.total_cmp(&b.0));
                c
            })
            .collect()
    };
    let base = build(&mut |_| 0.0);
    let (eps2_th, crossings) = threshold_once(&ds, &base).ok_or(AnalysisError::NoThreshold)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let mut samples = Vec::with_capacity(bootstrap);
    for _ in 0..bootstrap {
        let c = build(&mut |p| unit.sample(&mut rng) * p.stderr / p.p_l);
        if let Some((x, _)) = threshold_once(&ds, &c) {
            samples.push(x.ln());
        }
    }
    let stderr = if samples.len() > 1 {
        let m = samples.iter().sum::<f64>() / samples.len() as f64;
        let v = samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (samples.len() - 1) as f64;
        eps2_th * v.sqrt()
    } else {
        f64::NAN
    };
    Ok(Threshold {
        eps2_th,
        stderr,
        crossings,
    })
}

/// Parameters of `p_L = exp[(alpha ln eps2 + beta)(d + delta) + gamma]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
}

/// Published fit of the memory simulations.
pub const TABLE_I: ScalingParams = ScalingParams {
    alpha: 0.5978,
    beta: 2.9767,
    gamma: -3.9819,
    delta: 0.2923,
};

pub const TABLE_I_SIGMA: [f64; 4] = [0.0058, 0.0330, 0.0256, 0.0413];

impl ScalingParams {
    pub fn evaluate(&self, eps2: f64, d: f64) -> f64 {
        ((self.alpha * eps2.ln() + self.beta) * (d + self.delta) + self.gamma).exp()
    }

    /// Error rate at which the distance dependence vanishes.
    pub fn threshold(&self) -> f64 {
        (-self.beta / self.alpha).exp()
    }

    /// Surface-code logical CNOT rate, 14 blocks of d rounds.
    pub fn p_cnot(&self, eps2: f64, d: usize) -> f64 {
        14.0 * d as f64 * self.evaluate(eps2, d as f64)
    }

    fn from_vector(v: &Vector4<f64>) -> Self {
        Self {
            alpha: v[0],
            beta: v[1],
            gamma: v[2],
            delta: v[3],
        }
    }
}

pub fn evaluate(params: &ScalingParams, eps2: f64, d: usize) -> f64 {
    params.evaluate(eps2, d as f64)
}

/// `p_L = p_th (eps2 / eps2_th)^((d + 1) / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalModel {
    pub p_th: f64,
    pub eps2_th: f64,
}

impl EmpiricalModel {
    pub fn new(eps2_th: f64) -> Self {
        Self { p_th: 0.02, eps2_th }
    }

    pub fn evaluate(&self, eps2: f64, d: usize) -> f64 {
        self.p_th * (eps2 / self.eps2_th).powf((d as f64 + 1.0) / 2.0)
    }

    /// The same law written in the four-parameter form. The exponent
    /// `(d + 1) / 2` needs `delta = 1` once `alpha = 1/2`.
    pub fn as_scaling(&self) -> ScalingParams {
        ScalingParams {
            alpha: 0.5,
            beta: -0.5 * self.eps2_th.ln(),
            gamma: self.p_th.ln(),
            delta: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub params: ScalingParams,
    pub sigma: [f64; 4],
    pub covariance: [[f64; 4]; 4],
    pub chi2: f64,
    pub dof: usize,
    /// `ln p_L` measured minus predicted, per point.
    pub residuals: Vec<f64>,
    pub points: Vec<GridPoint>,
}

fn log_weight(p: &GridPoint) -> f64 {
    (p.p_l / p.stderr).powi(2)
}

/// Weighted linear least squares for (alpha, beta, gamma) at fixed delta.
fn linear_stage(points: &[GridPoint], delta: f64) -> Option<(Vector4<f64>, f64)> {
    let n = points.len();
    let mut a = DMatrix::zeros(n, 3);
    let mut b = DVector::zeros(n);
    for (i, p) in points.iter().enumerate() {
        let w = log_weight(p).sqrt();
        let x = p.d as f64 + delta;
        a[(i, 0)] = w * x * p.eps2.ln();
        a[(i, 1)] = w * x;
        a[(i, 2)] = w;
        b[i] = w * p.p_l.ln();
    }
    let sol = a.clone().svd(true, true).solve(&b, 1e-12).ok()?;
    let r = &a * &sol - &b;
    Some((Vector4::new(sol[0], sol[1], sol[2], delta), r.norm_squared()))
}

fn chi2_of(points: &[GridPoint], v: &Vector4<f64>) -> f64 {
    let m = ScalingParams::from_vector(v);
    points
        .iter()
        .map(|p| log_weight(p) * (p.p_l.ln() - m.evaluate(p.eps2, p.d as f64).ln()).powi(2))
        .sum()
}

/// Weighted nonlinear least squares in `ln p_L`: a scan over delta seeds
/// Levenberg-Marquardt on all four parameters.
pub fn fit_scaling(points: &[GridPoint]) -> Result<ScalingFit, AnalysisError> {
    let pts: Vec<GridPoint> = points.iter().copied().filter(GridPoint::usable).collect();
    if pts.len() < 5 || distinct_ds(&pts).len() < 2 {
        return Err(AnalysisError::InsufficientPoints {
            need: 5,
            got: pts.len(),
        });
    }
    let mut best: Option<(Vector4<f64>, f64)> = None;
    for k in 0..=60 {
        let delta = -1.5 + 0.05 * k as f64;
        if let Some((v, c)) = linear_stage(&pts, delta) {
            if best.as_ref().is_none_or(|b| c < b.1) {
                best = Some((v, c));
            }
        }
    }
    let (mut v, mut chi2) = best.ok_or(AnalysisError::NoConvergence)?;
    let mut lambda = 1e-3;
    let jac = |v: &Vector4<f64>| -> (Matrix4<f64>, Vector4<f64>) {
        let mut jtj = Matrix4::zeros();
        let mut jtr = Vector4::zeros();
        for p in &pts {
            let le = p.eps2.ln();
            let x = p.d as f64 + v[3];
            let model = (v[0] * le + v[1]) * x + v[2];
            let r = p.p_l.ln() - model;
            let g = Vector4::new(le * x, x, 1.0, v[0] * le + v[1]);
            let w = log_weight(p);
            jtj += w * g * g.transpose();
            jtr += w * r * g;
        }
        (jtj, jtr)
    };
    for _ in 0..200 {
        let (jtj, jtr) = jac(&v);
        let mut damped = jtj;
        for i in 0..4 {
            damped[(i, i)] *= 1.0 + lambda;
        }
        let Some(step) = damped.lu().solve(&jtr) else {
            lambda *= 10.0;
            continue;
        };
        let trial = v + step;
        let c = chi2_of(&pts, &trial);
        if c < chi2 {
            let done = (chi2 - c) < 1e-12 * chi2.max(1e-300);
            v = trial;
            chi2 = c;
            lambda = (lambda / 10.0).max(1e-12);
            if done {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    let (jtj, _) = jac(&v);
    let dof = pts.len().saturating_sub(4);
    let scale = if dof > 0 { (chi2 / dof as f64).max(1.0) } else { 1.0 };
    let cov = jtj.try_inverse().unwrap_or_else(|| Matrix4::from_element(f64::NAN)) * scale;
    let mut covariance = [[0.0; 4]; 4];
    let mut sigma = [0.0; 4];
    for i in 0..4 {
        for j in 0..4 {
            covariance[i][j] = cov[(i, j)];
        }
        sigma[i] = cov[(i, i)].sqrt();
    }
    let params = ScalingParams::from_vector(&v);
    if !v.iter().all(|x| x.is_finite()) {
        return Err(AnalysisError::NoConvergence);
    }
    let residuals = pts
        .iter()
        .map(|p| p.p_l.ln() - params.evaluate(p.eps2, p.d as f64).ln())
        .collect();
    Ok(ScalingFit {
        params,
        sigma,
        covariance,
        chi2,
        dof,
        residuals,
        points: pts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentRequirement {
    /// Smallest distance meeting the target.
    pub d: usize,
    pub s: usize,
    /// Segment size when the distance is restricted to odd values.
    pub s_odd: usize,
    pub p_cnot: f64,
}

/// Smallest segment whose surface-code CNOT rate `14 d p_L` meets `target`.
pub fn required_segment(params: &ScalingParams, eps2: f64, target: f64) -> Result<SegmentRequirement, AnalysisError> {
    if eps2 >= params.threshold() {
        return Err(AnalysisError::AboveThreshold(eps2));
    }
    let meets = |d: usize| params.p_cnot(eps2, d) <= target;
    let d = (3..100_000)
        .find(|&d| meets(d))
        .ok_or(AnalysisError::AboveThreshold(eps2))?;
    let d_odd = (3..100_000)
        .step_by(2)
        .find(|&d| meets(d))
        .ok_or(AnalysisError::AboveThreshold(eps2))?;
    Ok(SegmentRequirement {
        d,
        s: d + 2,
        s_odd: d_odd + 2,
        p_cnot: params.p_cnot(eps2, d),
    })
}

/// Largest eps2 reaching `target` with segment size `s`, by bisection in
/// `ln eps2` below the threshold.
pub fn max_error_rate(params: &ScalingParams, s: usize, target: f64) -> Option<f64> {
    let d = s.checked_sub(2)?;
    if d < 1 {
        return None;
    }
    let (mut lo, mut hi) = ((1e-12f64).ln(), params.threshold().ln());
    if params.p_cnot(lo.exp(), d) > target {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if params.p_cnot(mid.exp(), d) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo.exp())
}

/// `P_CNOT = exp(kappa ln p_CNOT + eta)` for one concatenation level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeScaling {
    pub kappa: f64,
    pub eta: f64,
}

impl GaugeScaling {
    pub fn evaluate(&self, p_cnot: f64) -> f64 {
        (self.kappa * p_cnot.ln() + self.eta).exp()
    }

    /// Surface-code rate at which two levels give the same gauge rate.
    pub fn crossing(&self, other: &GaugeScaling) -> Option<f64> {
        let dk = self.kappa - other.kappa;
        if dk.abs() < 1e-12 {
            return None;
        }
        Some(((other.eta - self.eta) / dk).exp())
    }
}

/// Published gauge-code fits for levels 1 to 4.
pub const TABLE_II: [GaugeScaling; 4] = [
    GaugeScaling {
        kappa: 0.9973,
        eta: 4.1141,
    },
    GaugeScaling {
        kappa: 1.0303,
        eta: 5.8552,
    },
    GaugeScaling {
        kappa: 2.0717,
        eta: 18.7274,
    },
    GaugeScaling {
        kappa: 3.4795,
        eta: 36.4548,
    },
];

/// Surface-code patches per gauge-code logical qubit at `level`.
pub fn gauge_overhead(level: u32) -> u64 {
    4 * 6u64.pow(level)
}

/// Expected logical CNOTs before one failure. Level 0 is the bare surface
/// code; higher levels apply the gauge-code law for that level.
pub fn gates_before_failure(
    surface: &ScalingParams,
    gauge: &[GaugeScaling],
    eps2: f64,
    s: usize,
    level: usize,
) -> Result<f64, AnalysisError> {
    if eps2 >= surface.threshold() {
        return Err(AnalysisError::AboveThreshold(eps2));
    }
    let d = s.saturating_sub(2).max(1);
    let p = surface.p_cnot(eps2, d);
    if level == 0 {
        return Ok(1.0 / p);
    }
    let g = gauge.get(level - 1).ok_or(AnalysisError::UnknownLevel(level))?;
    Ok(1.0 / g.evaluate(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaugeFit {
    pub params: GaugeScaling,
    pub sigma_kappa: f64,
    pub sigma_eta: f64,
    pub chi2: f64,
    pub points: usize,
}

/// Weighted straight-line fit of `ln P` against `ln p`. Points are
/// `(p_cnot, P, stderr of P)`; zero-failure points are skipped.
pub fn fit_gauge_scaling(points: &[(f64, f64, f64)]) -> Result<GaugeFit, AnalysisError> {
    let pts: Vec<_> = points
        .iter()
        .filter(|&&(p, q, s)| p > 0.0 && q > 0.0 && s > 0.0 && s.is_finite())
        .collect();
    if pts.len() < 3 {
        return Err(AnalysisError::InsufficientPoints {
            need: 3,
            got: pts.len(),
        });
    }
    let mut ata = Matrix2::zeros();
    let mut atb = Vector2::zeros();
    for &&(p, q, s) in &pts {
        let w = (q / s).powi(2);
        let g = Vector2::new(p.ln(), 1.0);
        ata += w * g * g.transpose();
        atb += w * q.ln() * g;
    }
    let inv = ata.try_inverse().ok_or(AnalysisError::NoConvergence)?;
    let sol = inv * atb;
    let chi2: f64 = pts
        .iter()
        .map(|&&(p, q, s)| (q / s).powi(2) * (q.ln() - sol[0] * p.ln() - sol[1]).powi(2))
        .sum();
    let dof = pts.len().saturating_sub(2);
    let scale = if dof > 0 { (chi2 / dof as f64).max(1.0) } else { 1.0 };
    Ok(GaugeFit {
        params: GaugeScaling {
            kappa: sol[0],
            eta: sol[1],
        },
        sigma_kappa: (inv[(0, 0)] * scale).sqrt(),
        sigma_eta: (inv[(1, 1)] * scale).sqrt(),
        chi2,
        points: pts.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_failures_give_bound() {
        let r = per_round_rate(0, 1000, 10).unwrap();
        assert_eq!(r.p_l, 0.0);
        let up = r.upper_bound.unwrap();
        assert!(up > 0.0 && up < 0.003 / 10.0 * 1.01);
    }

    #[test]
    fn half_failures_saturate() {
        assert!(per_round_rate(500, 1000, 5).unwrap().saturated);
        assert!(per_round_rate(11, 10, 5).is_err());
        assert!(per_round_rate(0, 0, 5).is_err());
    }

    #[test]
    fn one_round_is_identity() {
        let r = per_round_rate(100, 1000, 1).unwrap();
        assert!((r.p_l - 0.1).abs() < 1e-12);
        assert!((r.stderr - (0.09f64 / 1000.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn table_one_hand_value() {
        // (0.5978 ln 0.001 + 2.9767)(13.2923) - 3.9819
        let x = (0.5978 * (0.001f64).ln() + 2.9767) * 13.2923 - 3.9819;
        assert!((evaluate(&TABLE_I, 0.001, 13) - x.exp()).abs() < 1e-20);
        assert!((TABLE_I.threshold() - 0.006877).abs() < 2e-6);
    }

    #[test]
    fn empirical_law_is_the_same_shape() {
        let m = EmpiricalModel::new((-2.4809f64 / 0.5).exp());
        let s = m.as_scaling();
        assert!((s.beta - 2.4809).abs() < 1e-12);
        assert!((s.gamma + 3.9120).abs() < 1e-4);
        for d in [3, 7, 11] {
            assert!((m.evaluate(m.eps2_th, d) - 0.02).abs() < 1e-15);
            for e in [1e-4, 1e-3, 5e-3] {
                let a = m.evaluate(e, d);
                assert!((a - s.evaluate(e, d as f64)).abs() < 1e-9 * a);
                let half = ScalingParams { delta: 0.5, ..s };
                assert!((a - half.evaluate(e, d as f64)).abs() > 1e-3 * a);
            }
        }
    }

    #[test]
    fn overhead_counts() {
        assert_eq!(gauge_overhead(3), 864);
        assert_eq!(gauge_overhead(4), 5184);
    }

    #[test]
    fn level_zero_is_reciprocal() {
        let g = gates_before_failure(&TABLE_I, &TABLE_II, 0.001, 21, 0).unwrap();
        assert!((g * TABLE_I.p_cnot(0.001, 19) - 1.0).abs() < 1e-12);
        assert!(gates_before_failure(&TABLE_I, &TABLE_II, 0.01, 21, 0).is_err());
        assert!(gates_before_failure(&TABLE_I, &TABLE_II, 0.001, 21, 7).is_err());
    }

    #[test]
    fn max_error_rate_inverts_required_segment() {
        for s in [7usize, 11, 15, 21] {
            let e = max_error_rate(&TABLE_I, s, 4e-6).unwrap();
            let r = required_segment(&TABLE_I, e * 0.999, 4e-6).unwrap();
            assert!(r.s <= s);
            let r2 = required_segment(&TABLE_I, e * 1.001, 4e-6).unwrap();
            assert!(r2.s > s);
        }
    }
}
