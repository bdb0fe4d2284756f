//! Limit schedules, log-log order fits and convergence verdicts.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::Mat2;

/// Distance slope at or above which a sequence counts as converging.
pub const CONVERGE_SLOPE: f64 = 0.5;
/// Generator-norm slope at or below which a sequence counts as diverging.
pub const DIVERGE_SLOPE: f64 = -0.5;
/// Distances this small are treated as exact agreement. Without it an
/// identically vanishing generator shows a roundoff-driven slope of -1.
pub const EXACT_FLOOR: f64 = 1e-9;
/// Below this time step double-precision cancellation dominates the generator.
pub const MIN_DT: f64 = 1e-12;

/// How `Δx` follows `Δt` along a schedule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    FixedDx(f64),
    /// `Δx = v·Δt`
    Ratio(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitSchedule {
    dts: Vec<f64>,
    coupling: Coupling,
}

impl LimitSchedule {
    pub fn new(dts: Vec<f64>, coupling: Coupling) -> Result<Self> {
        validate_steps(&dts)?;
        match coupling {
            Coupling::FixedDx(dx) | Coupling::Ratio(dx) if !(dx > 0.0 && dx.is_finite()) => {
                return Err(Error::InvalidSchedule(format!(
                    "coupling constant must be positive, got {dx}"
                )))
            }
            _ => {}
        }
        Ok(LimitSchedule { dts, coupling })
    }

    /// `dt = 2^{-lo}, 2^{-lo-1}, …, 2^{-hi}`.
    pub fn geometric_pow2(lo: i32, hi: i32, coupling: Coupling) -> Result<Self> {
        let dts = (lo..=hi).map(|e| 2f64.powi(-e)).collect();
        LimitSchedule::new(dts, coupling)
    }

    /// The default `2^{-4} … 2^{-14}` schedule.
    pub fn standard(coupling: Coupling) -> Self {
        LimitSchedule::geometric_pow2(4, 14, coupling).expect("fixed schedule is valid")
    }

    pub fn dts(&self) -> &[f64] {
        &self.dts
    }

    pub fn coupling(&self) -> Coupling {
        self.coupling
    }

    pub fn dx_at(&self, dt: f64) -> f64 {
        match self.coupling {
            Coupling::FixedDx(dx) => dx,
            Coupling::Ratio(v) => v * dt,
        }
    }
}

/// Checks that `steps` is a usable strictly decreasing positive sequence.
pub fn validate_steps(steps: &[f64]) -> Result<()> {
    if steps.len() < 4 {
        return Err(Error::DegenerateSchedule(steps.len()));
    }
    if steps.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::InvalidSchedule("steps must be positive and finite".into()));
    }
    if steps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidSchedule("steps must be strictly decreasing".into()));
    }
    let last = *steps.last().unwrap();
    if last < MIN_DT {
        return Err(Error::InvalidSchedule(format!("smallest step {last:e} is below {MIN_DT:e}")));
    }
    Ok(())
}

/// Which step a report's slopes are measured against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Abscissa {
    Dt,
    Dx,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbePoint {
    pub dt: f64,
    pub dx: f64,
    pub distance: f64,
    /// Size of the probed object itself (generator norm, or the deviation
    /// for homotopy probes); used to detect divergence.
    pub generator_norm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converged,
    Diverged,
    Inconclusive,
}

/// Limit matrix estimated at one wavenumber.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KLimit {
    pub k: f64,
    pub matrix: Mat2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub label: String,
    pub abscissa: Abscissa,
    pub probe_points: Vec<ProbePoint>,
    /// Log-log slope of `distance` against the abscissa.
    pub fitted_slope: Option<f64>,
    /// Log-log slope of `generator_norm` against the abscissa.
    pub norm_slope: Option<f64>,
    pub verdict: Verdict,
    pub limit_estimate: Vec<KLimit>,
    /// Unit signs fitted against closed forms, by name.
    pub signs: BTreeMap<String, f64>,
    /// Distance between the estimated limit and the (sign-fitted) closed form.
    pub residual: Option<f64>,
    pub extras: BTreeMap<String, f64>,
}

impl ConvergenceReport {
    /// Builds a report and classifies it.
    pub fn from_points(label: impl Into<String>, abscissa: Abscissa, points: Vec<ProbePoint>) -> Self {
        let xs: Vec<f64> = points.iter().map(|p| abscissa_of(abscissa, p)).collect();
        let ds: Vec<f64> = points.iter().map(|p| p.distance).collect();
        let ns: Vec<f64> = points.iter().map(|p| p.generator_norm).collect();
        let fitted_slope = loglog_slope(&xs, &ds).ok();
        let norm_slope = loglog_slope(&xs, &ns).ok();
        let verdict = classify(&points, fitted_slope, norm_slope);
        ConvergenceReport {
            label: label.into(),
            abscissa,
            probe_points: points,
            fitted_slope,
            norm_slope,
            verdict,
            limit_estimate: Vec::new(),
            signs: BTreeMap::new(),
            residual: None,
            extras: BTreeMap::new(),
        }
    }

    pub fn last_distance(&self) -> Option<f64> {
        self.probe_points.last().map(|p| p.distance)
    }

    pub fn sign(&self, name: &str) -> Option<f64> {
        self.signs.get(name).copied()
    }

    /// Limit matrix at the sample closest to `k`.
    pub fn limit_at(&self, k: f64) -> Option<&Mat2> {
        self.limit_estimate
            .iter()
            .min_by(|a, b| (a.k - k).abs().total_cmp(&(b.k - k).abs()))
            .map(|l| &l.matrix)
    }
}

fn abscissa_of(a: Abscissa, p: &ProbePoint) -> f64 {
    match a {
        Abscissa::Dt => p.dt,
        Abscissa::Dx => p.dx,
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::InsufficientData("mismatched lengths".into()));
    }
    if xs.len() < 2 {
        return Err(Error::InsufficientData(format!("{} points", xs.len())));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InsufficientData("non-positive value in log-log fit".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae equal".into()));
    }
    Ok(sxy / sxx)
}

/// Empirical convergence order of a report's distances.
pub fn estimate_order(report: &ConvergenceReport) -> Result<f64> {
    let pts = &report.probe_points;
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!("{} probe points, need 4", pts.len())));
    }
    let xs: Vec<f64> = pts.iter().map(|p| abscissa_of(report.abscissa, p)).collect();
    let ds: Vec<f64> = pts.iter().map(|p| p.distance).collect();
    loglog_slope(&xs, &ds)
}

pub fn classify(points: &[ProbePoint], distance_slope: Option<f64>, norm_slope: Option<f64>) -> Verdict {
    if points.is_empty() {
        return Verdict::Inconclusive;
    }
    if points.iter().all(|p| p.distance <= EXACT_FLOOR) {
        return Verdict::Converged;
    }
    let norms_resolved = points.iter().all(|p| p.generator_norm > EXACT_FLOOR);
    if norms_resolved && norm_slope.is_some_and(|s| s <= DIVERGE_SLOPE) {
        return Verdict::Diverged;
    }
    if distance_slope.is_some_and(|s| s >= CONVERGE_SLOPE) {
        return Verdict::Converged;
    }
    Verdict::Inconclusive
}

/// First-order Richardson extrapolation to step zero.
pub fn richardson(coarse: (f64, &Mat2), fine: (f64, &Mat2)) -> Mat2 {
    let r = coarse.0 / fine.0;
    (fine.1.scale_real(r) - *coarse.1).scale_real(1.0 / (r - 1.0))
}

/// `count` wavenumbers at cell centres of the Brillouin zone `[-π/Δx, π/Δx)`.
pub fn brillouin_samples(count: usize, dx: f64) -> Vec<f64> {
    let width = 2.0 * PI / dx;
    (0..count)
        .map(|j| -PI / dx + (j as f64 + 0.5) * width / count as f64)
        .collect()
}
