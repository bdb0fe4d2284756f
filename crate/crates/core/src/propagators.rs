//! Exact evolution: per-mode spectral oracle, the Bessel closed form for the
//! continuous-time Hamiltonian, CTQW evolution, and the split of a walk
//! state into two dressed CTQW branches.
//!
//! Branch sign table. With `λ(k) = (θ1/2)cos(kΔx − α)` and the printed
//! orientation of `ct_hamiltonian`:
//!
//! | branch | eigenvalue | dressing     | CTQW sign |
//! |--------|------------|--------------|-----------|
//! | plus   | `+λ(k)`    | `e^{−iθ1t/2}` | `+1`      |
//! | minus  | `−λ(k)`    | `e^{+iθ1t/2}` | `−1`      |
//!
//! where `ctqw_evolve(…, sign, …)` solves
//! `i∂tΨ = sign·(θ1/4)[Ψ(x+Δx) + Ψ(x−Δx) − 2Ψ]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bessel::{bessel_j_table, table_lookup};
use crate::error::{Error, Result};
use crate::hamiltonian::{ct_branches, ct_hamiltonian, projector, KSpaceHamiltonian};
use crate::lattice::{apply_kspace_op, dft_forward, dft_inverse, Grid, KMode, KSpaceField, Spinor, SpinorField};
use crate::mat2::{Mat2, I, ONE};

/// `exp(−iH(k)t)` applied mode by mode.
pub fn spectral_evolve(field: &SpinorField, h: &KSpaceHamiltonian, t: f64) -> Result<SpinorField> {
    apply_kspace_op(field, |k| h.evaluate(k), KMode::Exponentiate(t))
}

/// Parameters of the Bessel-kernel propagator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BesselKernelSpec {
    pub theta1: f64,
    /// `(φ0 + ψ0)/2`
    pub alpha: f64,
    /// `(φ0 − ψ0)/2`
    pub beta: f64,
    pub t: f64,
    pub cutoff: usize,
}

/// Margin above `|θ1t|/2` past which `J_n` is negligible in double precision.
pub const CUTOFF_MARGIN: usize = 40;

impl BesselKernelSpec {
    /// Uses the minimal admissible cutoff.
    pub fn new(theta1: f64, phi0: f64, psi0: f64, t: f64) -> Self {
        let mut spec = BesselKernelSpec {
            theta1,
            alpha: 0.5 * (phi0 + psi0),
            beta: 0.5 * (phi0 - psi0),
            t,
            cutoff: 0,
        };
        spec.cutoff = spec.required_cutoff();
        spec
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Result<Self> {
        let required = self.required_cutoff();
        if cutoff < required {
            return Err(Error::CutoffTooSmall { cutoff, required });
        }
        self.cutoff = cutoff;
        Ok(self)
    }

    pub fn required_cutoff(&self) -> usize {
        (0.5 * (self.theta1 * self.t).abs()).ceil() as usize + CUTOFF_MARGIN
    }

    pub fn argument(&self) -> f64 {
        0.5 * self.theta1 * self.t
    }
}

/// Closed-form Bessel-series evolution:
///
/// `Ψ_L(m) = ½ Σ_d c_d [(1+(−1)^d)Ψ_L(m−d) + ie^{iβ}(1−(−1)^d)Ψ_R(m−d+1)]`
/// `Ψ_R(m) = ½ Σ_d c_d [−ie^{−iβ}(1−(−1)^d)Ψ_L(m−d−1) + (1+(−1)^d)Ψ_R(m−d)]`
///
/// with `c_d = i^d e^{iαd} J_d(θ1t/2)`, `|d| ≤ cutoff`, indices periodic.
/// This is `exp(−iGt)` for `G = ct_generator(θ1, φ0, ψ0, Δx)`.
pub fn bessel_propagate(field0: &SpinorField, spec: &BesselKernelSpec) -> Result<SpinorField> {
    let required = spec.required_cutoff();
    if spec.cutoff < required {
        return Err(Error::CutoffTooSmall { cutoff: spec.cutoff, required });
    }
    let table = bessel_j_table(spec.cutoff, spec.argument())?;
    let cut = spec.cutoff as i64;
    let coeffs: Vec<(i64, Complex64)> = (-cut..=cut)
        .map(|d| {
            let phase = I.powi(d.rem_euclid(4) as i32) * Complex64::from_polar(1.0, spec.alpha * d as f64);
            (d, phase * table_lookup(&table, d))
        })
        .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
        .collect();
    let hop_lr = I * Complex64::from_polar(1.0, spec.beta);
    let hop_rl = -I * Complex64::from_polar(1.0, -spec.beta);
    let n = field0.len() as i64;
    let src = field0.data();
    let at = |i: i64| src[i.rem_euclid(n) as usize];
    Ok(field0.map(|m, _| {
        let m = m as i64;
        let mut out = Spinor::zero();
        for &(d, c) in &coeffs {
            if d % 2 == 0 {
                let s = at(m - d);
                out.l += c * s.l;
                out.r += c * s.r;
            } else {
                out.l += c * hop_lr * at(m - d + 1).r;
                out.r += c * hop_rl * at(m - d - 1).l;
            }
        }
        out
    }))
}

/// Per-mode CTQW phase `exp(−i·sign·(θ1/4)(2cos kΔx − 2)t)`.
fn ctqw_phase(k: f64, dx: f64, theta1: f64, sign: f64, t: f64) -> Complex64 {
    let e = 0.25 * theta1 * (2.0 * (k * dx).cos() - 2.0);
    Complex64::from_polar(1.0, -sign * e * t)
}

fn check_sign(sign: f64) -> Result<f64> {
    if sign == 1.0 || sign == -1.0 {
        Ok(sign)
    } else {
        Err(Error::InvalidArgument(format!("sign must be +1 or -1, got {sign}")))
    }
}

/// Solves `i∂tΨ = sign·(θ1/4)[Ψ(x+Δx) + Ψ(x−Δx) − 2Ψ]` exactly in k-space;
/// both spin components evolve identically.
pub fn ctqw_evolve(field: &SpinorField, theta1: f64, sign: f64, t: f64) -> Result<SpinorField> {
    ctqw_evolve_twisted(field, theta1, sign, t, 0.0)
}

/// As [`ctqw_evolve`] for a field with twisted boundary
/// `Ψ(n + N) = e^{iτ}Ψ(n)`; the stored sites are `n = 0..N`.
pub fn ctqw_evolve_twisted(field: &SpinorField, theta1: f64, sign: f64, t: f64, twist: f64) -> Result<SpinorField> {
    let sign = check_sign(sign)?;
    let grid = *field.grid();
    let n = grid.n_sites() as f64;
    let untwisted = field.map(|x, s| s.scale(Complex64::from_polar(1.0, -twist * x as f64 / n)));
    let mut kf = dft_forward(&untwisted);
    let shift = twist / (n * grid.dx());
    for (j, v) in kf.data_mut().iter_mut().enumerate() {
        *v = v.scale(ctqw_phase(grid.wavenumber(j) + shift, grid.dx(), theta1, sign, t));
    }
    Ok(dft_inverse(&kf).map(|x, s| s.scale(Complex64::from_polar(1.0, twist * x as f64 / n))))
}

/// Walk state split into dressed branches `Ψ'± = e^{−iαn}P±Ψ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitPair {
    pub plus: SpinorField,
    pub minus: SpinorField,
    pub alpha: f64,
}

impl SplitPair {
    /// Boundary twist of the dressed branches on the ring.
    pub fn twist(&self) -> f64 {
        -self.alpha * self.plus.len() as f64
    }

    /// Evolves both branches with their CTQW equations (`+1` for plus, `−1` for minus).
    pub fn evolve(&self, theta1: f64, t: f64) -> Result<SplitPair> {
        Ok(SplitPair {
            plus: ctqw_evolve_twisted(&self.plus, theta1, 1.0, t, self.twist())?,
            minus: ctqw_evolve_twisted(&self.minus, theta1, -1.0, t, self.twist())?,
            alpha: self.alpha,
        })
    }
}

fn dress(field: &SpinorField, alpha: f64) -> SpinorField {
    field.map(|n, s| s.scale(Complex64::from_polar(1.0, alpha * n as f64)))
}

/// Spectral projection onto the two branches of `ct_hamiltonian(θ1, φ0, ψ0, Δx)`.
pub fn split_pm(field0: &SpinorField, theta1: f64, phi0: f64, psi0: f64) -> Result<SplitPair> {
    let grid = *field0.grid();
    let h = ct_hamiltonian(theta1, phi0, psi0, grid.dx())?;
    let kf = dft_forward(field0);
    let mut plus = Vec::with_capacity(kf.data().len());
    let mut minus = Vec::with_capacity(kf.data().len());
    for (j, v) in kf.data().iter().enumerate() {
        let [(_, vp), (_, vm)] = ct_branches(&h, grid.wavenumber(j))?;
        plus.push(projector(&vp) * *v);
        minus.push(projector(&vm) * *v);
    }
    let alpha = 0.5 * (phi0 + psi0);
    let back = |data: Vec<Spinor>| -> Result<SpinorField> {
        Ok(dress(&dft_inverse(&KSpaceField::from_vec(grid, data)?), -alpha))
    };
    Ok(SplitPair { plus: back(plus)?, minus: back(minus)?, alpha })
}

/// `e^{iαn}(e^{−iθ1t/2}Ψ'₊ + e^{iθ1t/2}Ψ'₋)`.
pub fn reconstruct(pair: &SplitPair, theta1: f64, alpha: f64, t: f64, grid: &Grid) -> Result<SpinorField> {
    if pair.plus.grid() != grid || pair.minus.grid() != grid {
        return Err(Error::GridMismatch);
    }
    let half = 0.5 * theta1 * t;
    let sum = pair
        .plus
        .scale(Complex64::from_polar(1.0, -half))
        .add(&pair.minus.scale(Complex64::from_polar(1.0, half)))?;
    Ok(dress(&sum, alpha))
}

/// Per-mode projectors `(P₊, P₋)` at wavenumber `k`.
pub fn branch_projectors(h: &KSpaceHamiltonian, k: f64) -> Result<(Mat2, Mat2)> {
    let [(_, vp), (_, vm)] = ct_branches(h, k)?;
    Ok((projector(&vp), projector(&vm)))
}

/// `½(I ∓ S̃(k)·e^{iβσz}σy)`, the closed form of the branch projectors.
pub fn projector_closed_form(k: f64, dx: f64, beta: f64) -> (Mat2, Mat2) {
    let x = Mat2::exp_i_sigma_z(k * dx) * Mat2::exp_i_sigma_z(beta) * Mat2::sigma_y();
    let half = ONE * 0.5;
    ((Mat2::identity() - x).scale(half), (Mat2::identity() + x).scale(half))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::bessel::bessel_j;
    use crate::hamiltonian::ct_generator;
    use crate::lattice::total_norm;

    fn field(g: Grid) -> SpinorField {
        SpinorField::from_fn(g, |n| {
            let x = n as f64 - g.n_sites() as f64 / 2.0;
            let env = (-x * x / 18.0).exp();
            Spinor::new(Complex64::new(env, 0.3 * env * x.sin()), Complex64::new(-0.5 * env, env * (0.4 * x).cos()))
        })
        .normalized()
    }

    #[test]
    fn spectral_identity_at_zero_time() {
        let g = Grid::new(32, 1.0).unwrap();
        let f = field(g);
        let h = ct_hamiltonian(4.0, PI / 2.0, -PI / 2.0, 1.0).unwrap();
        assert!(spectral_evolve(&f, &h, 0.0).unwrap().max_abs_diff(&f) < 1e-15);
        let d = SpinorField::delta(g, 3, Spinor::left());
        assert!((total_norm(&spectral_evolve(&d, &h, 1.0).unwrap()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bessel_kernel_at_zero_time() {
        let g = Grid::new(16, 1.0).unwrap();
        let f = field(g);
        let spec = BesselKernelSpec::new(2.0, 0.3, -0.7, 0.0);
        assert!(bessel_propagate(&f, &spec).unwrap().max_abs_diff(&f) < 1e-15);
    }

    #[test]
    fn bessel_kernel_cutoff_checked() {
        let spec = BesselKernelSpec::new(4.0, 0.0, 0.0, 10.0);
        assert_eq!(spec.cutoff, 60);
        assert!(matches!(spec.with_cutoff(59), Err(Error::CutoffTooSmall { cutoff: 59, required: 60 })));
        let mut bad = spec;
        bad.cutoff = 3;
        let g = Grid::new(8, 1.0).unwrap();
        assert!(bessel_propagate(&SpinorField::zeros(g), &bad).is_err());
    }

    #[test]
    fn bessel_matches_generator_evolution() {
        let g = Grid::new(64, 1.0).unwrap();
        let f = field(g);
        let (theta1, phi0, psi0) = (2.7, 0.9, -0.4);
        let spec = BesselKernelSpec::new(theta1, phi0, psi0, 3.0);
        let hg = ct_generator(theta1, phi0, psi0, g.dx()).unwrap();
        let a = bessel_propagate(&f, &spec).unwrap();
        let b = spectral_evolve(&f, &hg, 3.0).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn bessel_parity_from_delta() {
        let g = Grid::new(64, 1.0).unwrap();
        for s in [Spinor::left(), Spinor::right()] {
            let out = bessel_propagate(&SpinorField::delta(g, 0, s), &BesselKernelSpec::new(3.0, 0.4, 1.2, 2.0)).unwrap();
            for (m, v) in out.data().iter().enumerate() {
                if m % 2 == 1 {
                    assert!(v.l.norm() <= 1e-14 && v.r.norm() <= 1e-14);
                }
            }
            assert!((total_norm(&out) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ctqw_basics() {
        let g = Grid::new(64, 1.0).unwrap();
        let f = field(g);
        assert!(ctqw_evolve(&f, 2.0, 1.0, 0.0).unwrap().max_abs_diff(&f) < 1e-15);
        let c = SpinorField::from_fn(g, |_| Spinor::new(ONE, I));
        assert!(ctqw_evolve(&c, 2.0, -1.0, 5.0).unwrap().max_abs_diff(&c) < 1e-13);
        assert!((total_norm(&ctqw_evolve(&f, 3.0, -1.0, 2.5).unwrap()) - 1.0).abs() < 1e-12);
        assert!(ctqw_evolve(&f, 3.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn ctqw_delta_gives_bessel_moduli() {
        let g = Grid::new(128, 1.0).unwrap();
        let (theta1, t) = (3.0, 4.0);
        let out = ctqw_evolve(&SpinorField::delta(g, 0, Spinor::new(ONE, ONE)), theta1, 1.0, t).unwrap();
        for m in -20i64..=20 {
            let v = out.data()[m.rem_euclid(128) as usize];
            let j = bessel_j(m, theta1 * t / 2.0).unwrap().abs();
            assert!((v.l.norm() - j).abs() < 1e-12);
            assert_eq!(v.l, v.r);
        }
    }

    #[test]
    fn split_completeness_and_orthogonality() {
        let g = Grid::new(32, 1.0).unwrap();
        let f = field(g);
        let (theta1, phi0, psi0) = (1.3, 0.8, 0.2);
        let pair = split_pm(&f, theta1, phi0, psi0).unwrap();
        let back = reconstruct(&pair, theta1, pair.alpha, 0.0, &g).unwrap();
        assert!(back.max_abs_diff(&f) < 1e-12);
        let a = dft_forward(&dress(&pair.plus, pair.alpha));
        let b = dft_forward(&dress(&pair.minus, pair.alpha));
        for (x, y) in a.data().iter().zip(b.data()) {
            assert!(x.dot(y).norm() < 1e-12);
        }
    }

    #[test]
    fn split_of_branch_eigenvector() {
        let g = Grid::new(16, 1.0).unwrap();
        let (theta1, phi0, psi0) = (2.0, 0.5, 0.1);
        let h = ct_hamiltonian(theta1, phi0, psi0, 1.0).unwrap();
        let k = g.wavenumber(3);
        let [(_, vp), _] = ct_branches(&h, k).unwrap();
        let f = SpinorField::from_fn(g, |n| vp.scale(Complex64::from_polar(1.0, k * n as f64)));
        let pair = split_pm(&f, theta1, phi0, psi0).unwrap();
        assert!(total_norm(&pair.minus) < 1e-26);
    }

    #[test]
    fn projectors_closed_form() {
        let (theta1, phi0, psi0, dx) = (1.7, 0.0, 0.0, 1.0);
        let h = ct_hamiltonian(theta1, phi0, psi0, dx).unwrap();
        for k in [-2.5, -0.4, 0.0, 1.1] {
            let (pp, pm) = branch_projectors(&h, k).unwrap();
            let (cp, cm) = projector_closed_form(k, dx, 0.5 * (phi0 - psi0));
            assert!(pp.max_abs_diff(&cp) < 1e-15 && pm.max_abs_diff(&cm) < 1e-15);
        }
    }

    #[test]
    fn split_evolve_reconstruct_matches_spectral() {
        let g = Grid::new(32, 1.0).unwrap();
        let f = field(g);
        for (theta1, phi0, psi0) in [(4.0, PI / 2.0, -PI / 2.0), (2.2, 1.1, -0.3), (1.5, 2.9, 0.7)] {
            let h = ct_hamiltonian(theta1, phi0, psi0, g.dx()).unwrap();
            let pair = split_pm(&f, theta1, phi0, psi0).unwrap();
            for t in [0.5, 1.0, 2.0, 5.0] {
                let r = reconstruct(&pair.evolve(theta1, t).unwrap(), theta1, pair.alpha, t, &g).unwrap();
                assert!(r.max_abs_diff(&spectral_evolve(&f, &h, t).unwrap()) < 1e-9);
            }
        }
    }

    #[test]
    fn reconstruct_rejects_other_grid() {
        let g = Grid::new(8, 1.0).unwrap();
        let pair = split_pm(&field(g), 1.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            reconstruct(&pair, 1.0, 0.0, 0.0, &Grid::new(8, 0.5).unwrap()),
            Err(Error::GridMismatch)
        ));
    }
}
