//! Convergence harnesses: walk generators along a schedule against closed forms.
//!
//! Unit signs of the closed forms are never assumed; each check fits them at
//! the finest step and reports them in `ConvergenceReport::signs`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coin::{root_unity_coin, CoinSeries, PauliAxis, Unitary2};
use crate::convergence::{richardson, Abscissa, ConvergenceReport, Coupling, KLimit, LimitSchedule, ProbePoint};
use crate::error::{Error, Result};
use crate::hamiltonian::{ct_hamiltonian, ctcs_hamiltonian};
use crate::mat2::{Mat2, I};
use crate::walk::generator_matrix;

/// Generators for every `(dt, k)` pair, rows in schedule order.
fn generator_rows<F>(schedule: &LimitSchedule, ks: &[f64], gen: F) -> Vec<Vec<Mat2>>
where
    F: Fn(f64, f64, f64) -> Mat2 + Sync,
{
    schedule
        .dts()
        .par_iter()
        .map(|&dt| {
            let dx = schedule.dx_at(dt);
            ks.iter().map(|&k| gen(k, dx, dt)).collect()
        })
        .collect()
}

fn max_dist(row: &[Mat2], ks: &[f64], reference: &dyn Fn(f64) -> Mat2) -> f64 {
    row.iter()
        .zip(ks)
        .map(|(g, &k)| (*g - reference(k)).op_norm())
        .fold(0.0, f64::max)
}

fn max_norm(row: &[Mat2]) -> f64 {
    row.iter().map(Mat2::op_norm).fold(0.0, f64::max)
}

/// Assembles probe points, a Richardson limit estimate from the two finest
/// steps, and the residual of that estimate against `reference`.
fn assemble(
    label: String,
    schedule: &LimitSchedule,
    ks: &[f64],
    rows: &[Vec<Mat2>],
    reference: &dyn Fn(f64) -> Mat2,
) -> ConvergenceReport {
    let points = schedule
        .dts()
        .iter()
        .zip(rows)
        .map(|(&dt, row)| ProbePoint {
            dt,
            dx: schedule.dx_at(dt),
            distance: max_dist(row, ks, reference),
            generator_norm: max_norm(row),
        })
        .collect();
    let mut report = ConvergenceReport::from_points(label, Abscissa::Dt, points);
    let dts = schedule.dts();
    let (nc, nf) = (dts.len() - 2, dts.len() - 1);
    report.limit_estimate = ks
        .iter()
        .enumerate()
        .map(|(j, &k)| KLimit { k, matrix: richardson((dts[nc], &rows[nc][j]), (dts[nf], &rows[nf][j])) })
        .collect();
    report.residual = Some(
        report
            .limit_estimate
            .iter()
            .map(|l| (l.matrix - reference(l.k)).op_norm())
            .fold(0.0, f64::max),
    );
    report
}

fn check_ks(ks: &[f64]) -> Result<()> {
    if ks.is_empty() || ks.iter().any(|k| !k.is_finite()) {
        return Err(Error::InvalidArgument("need at least one finite k sample".into()));
    }
    Ok(())
}

/// A sign assignment and the closed form it selects.
type Candidate<'a, S> = (S, Box<dyn Fn(f64) -> Mat2 + Sync + 'a>);

/// Picks the candidate sign vector whose reference is closest to `row`.
fn fit<S: Copy>(row: &[Mat2], ks: &[f64], candidates: &[Candidate<'_, S>]) -> usize {
    let mut best = (0, f64::INFINITY);
    for (i, (_, r)) in candidates.iter().enumerate() {
        let d = max_dist(row, ks, r.as_ref());
        if d < best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// Continuous-time limit at fixed `Δx`: generator of `coin_at(series, dt)`
/// with `n` skipped steps against `s·ct_hamiltonian(θ1, φ0, ψ0, Δx)`.
pub fn ct_limit_check(
    series: &CoinSeries,
    n: u32,
    k_samples: &[f64],
    schedule: &LimitSchedule,
) -> Result<ConvergenceReport> {
    if n % 2 == 1 {
        return Err(Error::OddStepCount(n));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let Coupling::FixedDx(dx) = schedule.coupling() else {
        return Err(Error::InvalidSchedule("continuous-time limit needs fixed dx".into()));
    };
    check_ks(k_samples)?;
    let h = ct_hamiltonian(series.theta1, series.phi0, series.psi0, dx)?;
    let rows = generator_rows(schedule, k_samples, |k, dx, dt| {
        generator_matrix(k, &series.coin_at(dt), n, dx, dt)
    });
    let h2 = h.clone();
    let candidates: Vec<Candidate<f64>> = vec![
        (1.0, Box::new(move |k| h.evaluate(k))),
        (-1.0, Box::new(move |k| h2.evaluate(k).scale_real(-1.0))),
    ];
    let best = fit(rows.last().unwrap(), k_samples, &candidates);
    let mut report = assemble(format!("ct n={n}"), schedule, k_samples, &rows, candidates[best].1.as_ref());
    report.signs.insert("s".into(), candidates[best].0);
    Ok(report)
}

/// Growth of the generator norm for a coin family at one wavenumber.
pub fn divergence_check_family<F>(family: F, n: u32, k: f64, schedule: &LimitSchedule) -> Result<ConvergenceReport>
where
    F: Fn(f64) -> Unitary2 + Sync,
{
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let rows = generator_rows(schedule, &[k], |k, dx, dt| generator_matrix(k, &family(dt), n, dx, dt));
    let points = schedule
        .dts()
        .iter()
        .zip(&rows)
        .map(|(&dt, row)| {
            let norm = row[0].op_norm();
            ProbePoint { dt, dx: schedule.dx_at(dt), distance: norm, generator_norm: norm }
        })
        .collect();
    Ok(ConvergenceReport::from_points(format!("divergence n={n}"), Abscissa::Dt, points))
}

/// Odd skip counts: the generator norm is expected to grow like `1/Δt`.
pub fn divergence_check(series: &CoinSeries, n: u32, k: f64, schedule: &LimitSchedule) -> Result<ConvergenceReport> {
    if n % 2 == 0 {
        return Err(Error::InvalidArgument(format!("divergence check expects odd n, got {n}")));
    }
    divergence_check_family(|dt| series.coin_at(dt), n, k, schedule)
}

/// Root-of-unity coin skipped `m` steps with `Δx = vΔt`, against
/// `s·k·v·n_z(n̂·σ)`, or `s·k·v·σz` when the coin is the identity.
pub fn dirac_limit_check(
    l: u32,
    m: u32,
    axis: &PauliAxis,
    v: f64,
    k_samples: &[f64],
    schedule: &LimitSchedule,
) -> Result<ConvergenceReport> {
    match schedule.coupling() {
        Coupling::Ratio(r) if (r - v).abs() <= 1e-12 * v.abs().max(1.0) => {}
        _ => return Err(Error::InvalidSchedule(format!("dirac limit needs dx = v*dt with v = {v}"))),
    }
    check_ks(k_samples)?;
    let coin = root_unity_coin(l, m, axis)?;
    let trivial = l % m == 0;
    let shape = if trivial { Mat2::sigma_z() } else { axis.sigma().scale_real(axis.nz()) };
    let rows = generator_rows(schedule, k_samples, |k, dx, dt| generator_matrix(k, &coin, m, dx, dt));
    let candidates: Vec<Candidate<f64>> = [1.0, -1.0]
        .into_iter()
        .map(|s| -> Candidate<f64> { (s, Box::new(move |k: f64| shape.scale_real(s * k * v))) })
        .collect();
    let best = fit(rows.last().unwrap(), k_samples, &candidates);
    let mut report = assemble(format!("dirac l={l} m={m}"), schedule, k_samples, &rows, candidates[best].1.as_ref());
    report.signs.insert("s".into(), candidates[best].0);
    report.extras.insert("n_z".into(), axis.nz());
    report.extras.insert("identity_coin".into(), if trivial { 1.0 } else { 0.0 });
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CtcsReport {
    /// `φ0 + ψ0 = π`
    pub constrained: ConvergenceReport,
    /// `φ0 + ψ0 = π − violation`
    pub violated: ConvergenceReport,
}

/// Constraint offset used for the violated branch of [`ctcs_limit_check`].
pub const CTCS_VIOLATION: f64 = 0.1;

/// `ct_hamiltonian(α/Δx, π − ψ0, ψ0, Δx)` against `ctcs_hamiltonian(α, ψ0)` as `Δx → 0`.
pub fn ctcs_limit_check(alpha_coef: f64, psi0: f64, k_samples: &[f64], dx_schedule: &[f64]) -> Result<CtcsReport> {
    crate::convergence::validate_steps(dx_schedule)?;
    check_ks(k_samples)?;
    let target = ctcs_hamiltonian(alpha_coef, psi0);
    let run = |offset: f64, label: &str| -> Result<ConvergenceReport> {
        let points = dx_schedule
            .par_iter()
            .map(|&dx| {
                let h = ct_hamiltonian(alpha_coef / dx, std::f64::consts::PI - psi0 - offset, psi0, dx)?;
                let mut dist: f64 = 0.0;
                let mut norm: f64 = 0.0;
                for &k in k_samples {
                    let hk = h.evaluate(k);
                    dist = dist.max((hk - target.evaluate(k)).op_norm());
                    norm = norm.max(hk.op_norm());
                }
                Ok(ProbePoint { dt: 0.0, dx, distance: dist, generator_norm: norm })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConvergenceReport::from_points(label, Abscissa::Dx, points))
    };
    let mut constrained = run(0.0, "ctcs constrained")?;
    constrained.residual = constrained.last_distance();
    constrained.limit_estimate = k_samples.iter().map(|&k| KLimit { k, matrix: target.evaluate(k) }).collect();
    let violated = run(CTCS_VIOLATION, "ctcs violated")?;
    Ok(CtcsReport { constrained, violated })
}

/// `‖H − H†‖ ≤ 1e-12·max(‖H‖, 1)`.
fn require_hermitian(m: &Mat2) -> Result<()> {
    let deviation = m.hermiticity_defect();
    if !(deviation <= 1e-12 * m.op_norm().max(1.0)) {
        return Err(Error::NonHermitianInput { deviation });
    }
    Ok(())
}

/// Coin `e^{iΔtB}`, shift `e^{ikΔxA}`, no skipping, `Δx = vΔt`, against
/// `s_a·k·v·A + s_b·B`.
pub fn dirac_type_limit_check(
    a_op: &Mat2,
    b_op: &Mat2,
    v: f64,
    k_samples: &[f64],
    schedule: &LimitSchedule,
) -> Result<ConvergenceReport> {
    require_hermitian(a_op)?;
    require_hermitian(b_op)?;
    match schedule.coupling() {
        Coupling::Ratio(r) if (r - v).abs() <= 1e-12 * v.abs().max(1.0) => {}
        _ => return Err(Error::InvalidSchedule(format!("dirac-type limit needs dx = v*dt with v = {v}"))),
    }
    check_ks(k_samples)?;
    let (a, b) = (*a_op, *b_op);
    let rows = generator_rows(schedule, k_samples, |k, dx, dt| {
        // exp(iM s) = exp(−iM(−s))
        let one_step = a.exp_hermitian(-k * dx) * b.exp_hermitian(-dt);
        (one_step - Mat2::identity()).scale(I / dt)
    });
    let mut candidates: Vec<Candidate<[f64; 2]>> = Vec::new();
    for sa in [1.0, -1.0] {
        for sb in [1.0, -1.0] {
            candidates.push(([sa, sb], Box::new(move |k: f64| a.scale_real(sa * k * v) + b.scale_real(sb))));
        }
    }
    let best = fit(rows.last().unwrap(), k_samples, &candidates);
    let mut report = assemble("dirac-type".into(), schedule, k_samples, &rows, candidates[best].1.as_ref());
    let [sa, sb] = candidates[best].0;
    report.signs.insert("s_a".into(), sa);
    report.signs.insert("s_b".into(), sb);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::convergence::{brillouin_samples, estimate_order, Verdict};

    fn fixed() -> LimitSchedule {
        LimitSchedule::standard(Coupling::FixedDx(1.0))
    }

    #[test]
    fn strauch_converges_with_order_one() {
        let r = ct_limit_check(&CoinSeries::strauch(1.0), 2, &brillouin_samples(16, 1.0), &fixed()).unwrap();
        assert_eq!(r.verdict, Verdict::Converged);
        assert!((estimate_order(&r).unwrap() - 1.0).abs() < 0.1);
        assert_eq!(r.sign("s"), Some(-1.0));
        assert!(r.last_distance().unwrap() < 1e-3);
    }

    #[test]
    fn strauch_residual_at_tiny_dt() {
        let s = LimitSchedule::new(vec![4e-6, 3e-6, 2e-6, 1e-6], Coupling::FixedDx(1.0)).unwrap();
        let r = ct_limit_check(&CoinSeries::strauch(1.0), 2, &[0.0, 0.9, -2.2], &s).unwrap();
        assert!(r.last_distance().unwrap() <= 1e-4);
    }

    #[test]
    fn off_lattice_theta0_diverges() {
        let mut s = CoinSeries::strauch(1.0);
        s.theta0 = PI / 2.0;
        let r = ct_limit_check(&s, 2, &[0.3, 1.0], &fixed()).unwrap();
        assert_eq!(r.verdict, Verdict::Diverged);
    }

    #[test]
    fn stationary_family_converges_to_zero() {
        let s = CoinSeries::admissible(1, 0.4, 0.2, 0.0, -0.3, 0.5);
        let r = ct_limit_check(&s, 2, &[0.3, 1.0, -2.0], &fixed()).unwrap();
        assert_eq!(r.verdict, Verdict::Converged);
        assert!(r.limit_estimate.iter().all(|l| l.matrix.op_norm() < 1e-9));
    }

    #[test]
    fn odd_n_rejected_by_ct_check() {
        assert!(matches!(
            ct_limit_check(&CoinSeries::strauch(1.0), 3, &[0.1], &fixed()),
            Err(Error::OddStepCount(3))
        ));
    }

    #[test]
    fn odd_n_diverges() {
        for n in [1, 3] {
            let r = divergence_check(&CoinSeries::strauch(1.0), n, 0.7, &fixed()).unwrap();
            assert_eq!(r.verdict, Verdict::Diverged);
            assert!((r.norm_slope.unwrap() + 1.0).abs() < 0.1);
        }
        let z = root_unity_coin(1, 2, &PauliAxis::z()).unwrap();
        let r = divergence_check_family(|_| z, 1, 0.7, &fixed()).unwrap();
        assert_eq!(r.verdict, Verdict::Diverged);
    }

    #[test]
    fn dirac_limit_z_axis() {
        let sched = LimitSchedule::standard(Coupling::Ratio(1.0));
        let ks = [-1.0, 0.0, 0.5, 2.0];
        let r = dirac_limit_check(1, 2, &PauliAxis::z(), 1.0, &ks, &sched).unwrap();
        assert_eq!(r.verdict, Verdict::Converged);
        assert!(r.limit_at(0.0).unwrap().op_norm() <= 1e-10);
        assert!(r.residual.unwrap() < 1e-6);
        assert_eq!(r.sign("s").map(f64::abs), Some(1.0));
    }

    #[test]
    fn dirac_limit_x_axis_vanishes() {
        let sched = LimitSchedule::standard(Coupling::Ratio(1.0));
        let r = dirac_limit_check(1, 2, &PauliAxis::x(), 1.0, &[-1.0, 0.5, 2.0], &sched).unwrap();
        assert_eq!(r.verdict, Verdict::Converged);
        assert!(r.limit_estimate.iter().all(|l| l.matrix.op_norm() < 1e-9));
    }

    #[test]
    fn identity_coin_is_transport() {
        let sched = LimitSchedule::standard(Coupling::Ratio(2.0));
        let r = dirac_limit_check(0, 1, &PauliAxis::x(), 2.0, &[-1.0, 0.5], &sched).unwrap();
        assert_eq!(r.verdict, Verdict::Converged);
        assert!(r.residual.unwrap() < 1e-6);
        let s = r.sign("s").unwrap();
        assert!(r.limit_at(0.5).unwrap().max_abs_diff(&Mat2::sigma_z().scale_real(s * 0.5 * 2.0)) < 1e-6);
    }

    #[test]
    fn ctcs_limit() {
        let dxs: Vec<f64> = (4..=14).map(|e| 2f64.powi(-e)).collect();
        let r = ctcs_limit_check(2.0, 0.3, &[0.5], &dxs).unwrap();
        assert_eq!(r.constrained.verdict, Verdict::Converged);
        assert!((r.constrained.fitted_slope.unwrap() - 1.0).abs() < 0.1);
        assert_eq!(r.violated.verdict, Verdict::Diverged);
        assert!((r.violated.fitted_slope.unwrap() + 1.0).abs() < 0.1);
        let z = ctcs_limit_check(2.0, 0.3, &[0.0], &dxs).unwrap();
        assert!(z.constrained.probe_points.iter().all(|p| p.generator_norm < 1e-12));
    }

    #[test]
    fn dirac_type_mass() {
        let sched = LimitSchedule::standard(Coupling::Ratio(1.0));
        let a = Mat2::sigma_z();
        let b = Mat2::sigma_x().scale_real(0.5);
        let r = dirac_type_limit_check(&a, &b, 1.0, &[0.0, 0.7], &sched).unwrap();
        let (lo, hi) = r.limit_at(0.0).unwrap().hermitian_eigenvalues();
        assert!((hi - 0.5).abs() < 1e-6 && (lo + 0.5).abs() < 1e-6);
        let bad = Mat2::sigma_y().scale(I);
        assert!(matches!(
            dirac_type_limit_check(&a, &bad, 1.0, &[0.0], &sched),
            Err(Error::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn dirac_type_without_mass_is_transport() {
        let sched = LimitSchedule::standard(Coupling::Ratio(1.5));
        let a = Mat2::sigma_z();
        let r = dirac_type_limit_check(&a, &Mat2::zero(), 1.5, &[-1.0, 0.4], &sched).unwrap();
        let sa = r.sign("s_a").unwrap();
        assert!(r.limit_at(0.4).unwrap().max_abs_diff(&a.scale_real(sa * 0.4 * 1.5)) < 1e-9);
    }
}
