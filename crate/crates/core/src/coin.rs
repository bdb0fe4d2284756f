//! Coins: 2x2 unitaries, their ZYZ Euler angles, Δt-dependent coin series
//! and root-of-unity analysis.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::convergence::{validate_steps, Abscissa, ConvergenceReport, ProbePoint, Verdict};
use crate::error::{Error, Result};
use crate::mat2::{Mat2, ZERO};

/// Unitarity tolerance enforced by [`Unitary2::new`].
pub const UNITARY_TOL: f64 = 1e-12;

/// A 2x2 unitary, checked on construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Mat2", into = "Mat2")]
pub struct Unitary2(Mat2);

impl Unitary2 {
    pub fn new(m: Mat2) -> Result<Self> {
        Unitary2::with_tolerance(m, UNITARY_TOL)
    }

    pub fn with_tolerance(m: Mat2, tol: f64) -> Result<Self> {
        let deviation = m.unitarity_defect();
        if !(deviation <= tol) {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Unitary2(m))
    }

    /// For products of unitaries built in this crate.
    pub(crate) fn trusted(m: Mat2) -> Self {
        Unitary2(m)
    }

    pub fn identity() -> Self {
        Unitary2(Mat2::identity())
    }

    /// `(1/√2)[[1, −1], [1, 1]]`
    pub fn hadamard() -> Self {
        Unitary2(Mat2::from_real(1.0, -1.0, 1.0, 1.0).scale_real(FRAC_1_SQRT_2))
    }

    pub fn sigma_x() -> Self {
        Unitary2(Mat2::sigma_x())
    }

    pub fn sigma_y() -> Self {
        Unitary2(Mat2::sigma_y())
    }

    pub fn sigma_z() -> Self {
        Unitary2(Mat2::sigma_z())
    }

    pub fn mat(&self) -> &Mat2 {
        &self.0
    }

    /// Multiplies by the global phase `e^{iχ}`.
    pub fn with_phase(&self, chi: f64) -> Self {
        Unitary2(self.0.scale(Complex64::from_polar(1.0, chi)))
    }
}

impl From<Unitary2> for Mat2 {
    fn from(u: Unitary2) -> Mat2 {
        u.0
    }
}

impl TryFrom<Mat2> for Unitary2 {
    type Error = Error;

    fn try_from(m: Mat2) -> Result<Self> {
        Unitary2::new(m)
    }
}

impl std::ops::Mul for Unitary2 {
    type Output = Unitary2;

    fn mul(self, rhs: Unitary2) -> Unitary2 {
        Unitary2(self.0 * rhs.0)
    }
}

/// `e^{−iaσz/2}`
pub fn rz(a: f64) -> Mat2 {
    Mat2::diag(Complex64::from_polar(1.0, -0.5 * a), Complex64::from_polar(1.0, 0.5 * a))
}

/// `e^{−iaσy/2}`
pub fn ry(a: f64) -> Mat2 {
    let (s, c) = (0.5 * a).sin_cos();
    Mat2::from_real(c, -s, s, c)
}

/// Euler angles of `e^{iδ}·Rz(ψ)·Ry(θ)·Rz(φ)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoinZYZ {
    pub delta: f64,
    pub psi: f64,
    pub theta: f64,
    pub phi: f64,
}

impl CoinZYZ {
    pub fn new(delta: f64, psi: f64, theta: f64, phi: f64) -> Self {
        CoinZYZ { delta, psi, theta, phi }
    }
}

pub fn compose_zyz(c: &CoinZYZ) -> Unitary2 {
    let m = rz(c.psi) * ry(c.theta) * rz(c.phi);
    Unitary2::trusted(m.scale(Complex64::from_polar(1.0, c.delta)))
}

/// Below this `|sin(θ/2)|` or `|cos(θ/2)|` the decomposition is degenerate.
const DEGENERATE_TOL: f64 = 1e-12;

/// Wraps into `(−π, π]`, returning the number of `2π` turns removed.
fn wrap_counting(a: f64) -> (f64, i64) {
    let turns = ((a - PI) / (2.0 * PI)).ceil();
    (a - turns * 2.0 * PI, turns as i64)
}

fn wrap(a: f64) -> f64 {
    wrap_counting(a).0
}

/// Inverse of [`compose_zyz`]. `θ ∈ [0, π]`, the other angles in `(−π, π]`;
/// at `θ ∈ {0, π}` only one combination of `ψ, φ` is fixed and `ψ = 0`.
pub fn decompose_zyz(u: &Mat2) -> Result<CoinZYZ> {
    let deviation = u.unitarity_defect();
    if !(deviation <= 1e-10) {
        return Err(Error::NotUnitary { deviation });
    }
    let delta = 0.5 * u.det().arg();
    let v = u.scale(Complex64::from_polar(1.0, -delta)).0;
    let (a00, a10) = (v[0][0].norm(), v[1][0].norm());
    let (psi, theta, phi) = if a10 < DEGENERATE_TOL {
        (0.0, 0.0, 2.0 * v[1][1].arg())
    } else if a00 < DEGENERATE_TOL {
        (0.0, PI, -2.0 * v[1][0].arg())
    } else {
        let theta = 2.0 * a10.atan2(a00);
        (v[1][1].arg() + v[1][0].arg(), theta, v[1][1].arg() - v[1][0].arg())
    };
    // Each 2π turn of ψ or φ flips the sign of its Rz factor; δ absorbs it.
    let (psi, tp) = wrap_counting(psi);
    let (phi, tf) = wrap_counting(phi);
    let flips = (tp + tf).rem_euclid(2);
    let delta = wrap(delta + PI * flips as f64);
    Ok(CoinZYZ { delta, psi, theta, phi })
}

/// Coin angles expanded to first order in `Δt`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CoinSeries {
    pub delta: f64,
    pub psi0: f64,
    pub psi1: f64,
    pub theta0: f64,
    pub theta1: f64,
    pub phi0: f64,
    pub phi1: f64,
}

impl CoinSeries {
    pub fn is_finite(&self) -> bool {
        [self.delta, self.psi0, self.psi1, self.theta0, self.theta1, self.phi0, self.phi1]
            .iter()
            .all(|a| a.is_finite())
    }

    /// `δ = −pπ/2`, `θ0 = pπ`: the form that admits a continuous-time limit.
    pub fn admissible(p: i32, psi0: f64, psi1: f64, theta1: f64, phi0: f64, phi1: f64) -> Self {
        CoinSeries {
            delta: -(p as f64) * PI / 2.0,
            psi0,
            psi1,
            theta0: p as f64 * PI,
            theta1,
            phi0,
            phi1,
        }
    }

    /// Admissible series with hopping rate `γ`: `ψ0 = −π/2`, `φ0 = π/2`,
    /// `θ1 = 4γ`. Its `n = 2` generator tends to `γ(I + e^{2ikΔxσz})σx`.
    pub fn strauch(gamma: f64) -> Self {
        CoinSeries::admissible(1, -PI / 2.0, 0.0, 4.0 * gamma, PI / 2.0, 0.0)
    }

    /// The walk coin `e^{−i(π/2 − γΔt)σx}` written as a series
    /// (`δ = 0`, `θ1 = −2γ`). Not admissible: with `δ = 0`, `(SC)² → −I`.
    pub fn strauch_walk(gamma: f64) -> Self {
        CoinSeries {
            delta: 0.0,
            psi0: -PI / 2.0,
            theta0: PI,
            theta1: -2.0 * gamma,
            phi0: PI / 2.0,
            ..CoinSeries::default()
        }
    }

    pub fn angles_at(&self, dt: f64) -> CoinZYZ {
        CoinZYZ {
            delta: self.delta,
            psi: self.psi0 + self.psi1 * dt,
            theta: self.theta0 + self.theta1 * dt,
            phi: self.phi0 + self.phi1 * dt,
        }
    }

    pub fn coin_at(&self, dt: f64) -> Unitary2 {
        compose_zyz(&self.angles_at(dt))
    }
}

/// `Rz(ψ0)·σy·Ry(θ1Δt)·Rz(φ0)`.
pub fn ct_family_coin(psi0: f64, phi0: f64, theta1: f64, dt: f64) -> Unitary2 {
    Unitary2::trusted(rz(psi0) * Mat2::sigma_y() * ry(theta1 * dt) * rz(phi0))
}

/// Unit vector `n̂`, paired with `n̂·σ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliAxis {
    nx: f64,
    ny: f64,
    nz: f64,
}

impl PauliAxis {
    pub fn new(nx: f64, ny: f64, nz: f64) -> Result<Self> {
        let norm = (nx * nx + ny * ny + nz * nz).sqrt();
        if !((norm - 1.0).abs() <= 1e-12) {
            return Err(Error::AxisNotNormalized { norm });
        }
        Ok(PauliAxis { nx, ny, nz })
    }

    /// Scales a nonzero vector to unit length.
    pub fn normalized(nx: f64, ny: f64, nz: f64) -> Result<Self> {
        let norm = (nx * nx + ny * ny + nz * nz).sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::AxisNotNormalized { norm });
        }
        Ok(PauliAxis { nx: nx / norm, ny: ny / norm, nz: nz / norm })
    }

    pub fn x() -> Self {
        PauliAxis { nx: 1.0, ny: 0.0, nz: 0.0 }
    }

    pub fn y() -> Self {
        PauliAxis { nx: 0.0, ny: 1.0, nz: 0.0 }
    }

    pub fn z() -> Self {
        PauliAxis { nx: 0.0, ny: 0.0, nz: 1.0 }
    }

    pub fn components(&self) -> [f64; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn nz(&self) -> f64 {
        self.nz
    }

    pub fn sigma(&self) -> Mat2 {
        Mat2::from_pauli(ZERO, self.nx.into(), self.ny.into(), self.nz.into())
    }
}

/// `e^{iπl/m}·e^{−i(πl/m)n̂·σ}`, an m-th root of the identity.
pub fn root_unity_coin(l: u32, m: u32, axis: &PauliAxis) -> Result<Unitary2> {
    if m == 0 {
        return Err(Error::InvalidArgument("root_unity_coin needs m >= 1".into()));
    }
    let a = PI * l as f64 / m as f64;
    let (s, c) = a.sin_cos();
    let rot = Mat2::identity().scale_real(c) - axis.sigma().scale(Complex64::new(0.0, s));
    Ok(Unitary2::trusted(rot.scale(Complex64::from_polar(1.0, a))))
}

/// `‖uᵐ − I‖` in operator norm.
pub fn power_deviation(u: &Unitary2, m: u32) -> f64 {
    (u.mat().pow(m) - Mat2::identity()).op_norm()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HomotopyReport {
    pub report: ConvergenceReport,
    /// Whether `family(dt)ᵐ → I` as `dt → 0`.
    pub approaches: bool,
}

/// Tracks `power_deviation(family(dt), m)` along a decreasing `dt` schedule.
pub fn homotopy_probe<F>(family: F, m: u32, schedule: &[f64]) -> Result<HomotopyReport>
where
    F: Fn(f64) -> Unitary2 + Sync,
{
    validate_steps(schedule)?;
    let points: Vec<ProbePoint> = schedule
        .par_iter()
        .map(|&dt| {
            let d = power_deviation(&family(dt), m);
            ProbePoint { dt, dx: 0.0, distance: d, generator_norm: d }
        })
        .collect();
    let mut report = ConvergenceReport::from_points(format!("homotopy m={m}"), Abscissa::Dt, points);
    // A constant deviation must not read as divergence.
    if report.verdict == Verdict::Diverged {
        report.verdict = Verdict::Inconclusive;
    }
    let approaches = report.verdict == Verdict::Converged;
    Ok(HomotopyReport { report, approaches })
}
