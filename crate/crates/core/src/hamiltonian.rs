//! Closed-form limit Hamiltonians in k-space.
//!
//! Orientation: [`ct_hamiltonian`] is `−(θ1/4)(e^{iφ0σz} + e^{2ikΔxσz}e^{−iψ0σz})σy`.
//! The Δt → 0 limit of the walk generator `i[(S̃C)ⁿ − I]/(nΔt)` for the
//! continuous-time coin family is its negative, exposed as [`ct_generator`].
//! Both share eigenvectors and the spectrum `±(θ1/2)cos(kΔx − α)`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::Spinor;
use crate::mat2::{Mat2, I, ONE};

type Evaluator = Arc<dyn Fn(f64) -> Mat2 + Send + Sync>;

#[derive(Clone)]
pub enum HamiltonianKind {
    ContinuousTime { theta1: f64, phi0: f64, psi0: f64, dx: f64 },
    SpaceLimit { alpha_coef: f64, psi0: f64 },
    Custom(Evaluator),
}

/// A 2x2 Hermitian matrix function of the wavenumber, times a unit sign.
#[derive(Clone)]
pub struct KSpaceHamiltonian {
    kind: HamiltonianKind,
    label: String,
    sign: f64,
}

impl fmt::Debug for KSpaceHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KSpaceHamiltonian")
            .field("label", &self.label)
            .field("sign", &self.sign)
            .field("params", &self.params())
            .finish()
    }
}

impl KSpaceHamiltonian {
    pub fn custom(label: impl Into<String>, f: impl Fn(f64) -> Mat2 + Send + Sync + 'static) -> Self {
        KSpaceHamiltonian { kind: HamiltonianKind::Custom(Arc::new(f)), label: label.into(), sign: 1.0 }
    }

    pub fn kind(&self) -> &HamiltonianKind {
        &self.kind
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn negated(&self) -> Self {
        KSpaceHamiltonian { kind: self.kind.clone(), label: format!("-{}", self.label), sign: -self.sign }
    }

    pub fn params(&self) -> BTreeMap<&'static str, f64> {
        let mut p = BTreeMap::new();
        match self.kind {
            HamiltonianKind::ContinuousTime { theta1, phi0, psi0, dx } => {
                p.insert("theta1", theta1);
                p.insert("phi0", phi0);
                p.insert("psi0", psi0);
                p.insert("dx", dx);
            }
            HamiltonianKind::SpaceLimit { alpha_coef, psi0 } => {
                p.insert("alpha_coef", alpha_coef);
                p.insert("psi0", psi0);
            }
            HamiltonianKind::Custom(_) => {}
        }
        p.insert("sign", self.sign);
        p
    }

    pub fn evaluate(&self, k: f64) -> Mat2 {
        let base = match &self.kind {
            HamiltonianKind::ContinuousTime { theta1, phi0, psi0, dx } => {
                let sum = Mat2::exp_i_sigma_z(*phi0) + Mat2::exp_i_sigma_z(2.0 * k * dx - psi0);
                (sum * Mat2::sigma_y()).scale_real(-theta1 / 4.0)
            }
            HamiltonianKind::SpaceLimit { alpha_coef, psi0 } => {
                (Mat2::exp_i_sigma_z(-psi0) * Mat2::sigma_x()).scale_real(-alpha_coef / 2.0 * k)
            }
            HamiltonianKind::Custom(f) => f(k),
        };
        base.scale_real(self.sign)
    }

    /// Largest `‖H(k) − H(k)†‖` over the given wavenumbers.
    pub fn max_hermiticity_defect(&self, ks: &[f64]) -> f64 {
        ks.iter().map(|&k| self.evaluate(k).hermiticity_defect()).fold(0.0, f64::max)
    }
}

/// `−(θ1/4)(e^{iφ0σz} + e^{2ikΔxσz}e^{−iψ0σz})σy`.
pub fn ct_hamiltonian(theta1: f64, phi0: f64, psi0: f64, dx: f64) -> Result<KSpaceHamiltonian> {
    if !(dx > 0.0 && dx.is_finite()) {
        return Err(Error::InvalidArgument(format!("dx must be positive, got {dx}")));
    }
    Ok(KSpaceHamiltonian {
        kind: HamiltonianKind::ContinuousTime { theta1, phi0, psi0, dx },
        label: "ct".into(),
        sign: 1.0,
    })
}

/// The walk-generator limit, `−ct_hamiltonian`.
pub fn ct_generator(theta1: f64, phi0: f64, psi0: f64, dx: f64) -> Result<KSpaceHamiltonian> {
    Ok(ct_hamiltonian(theta1, phi0, psi0, dx)?.negated())
}

/// `−(α/2)e^{−iψ0σz}·k·σx`, the massless limit of `ct_hamiltonian` with
/// `θ1 = α/Δx` and `φ0 + ψ0 = π` as `Δx → 0`.
pub fn ctcs_hamiltonian(alpha_coef: f64, psi0: f64) -> KSpaceHamiltonian {
    KSpaceHamiltonian {
        kind: HamiltonianKind::SpaceLimit { alpha_coef, psi0 },
        label: "ctcs".into(),
        sign: 1.0,
    }
}

/// Eigenpairs with `lambda_plus ≥ lambda_minus`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CtSpectrum {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub v_plus: Spinor,
    pub v_minus: Spinor,
    /// `|λ₊ − λ₋| < 1e-12`; the vectors then follow the analytic branches.
    pub degenerate: bool,
}

/// Parameters of a continuous-time Hamiltonian in `(α, β)` form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CtAngles {
    pub theta1: f64,
    pub alpha: f64,
    pub beta: f64,
    pub dx: f64,
    pub sign: f64,
}

pub fn ct_angles(h: &KSpaceHamiltonian) -> Result<CtAngles> {
    match h.kind {
        HamiltonianKind::ContinuousTime { theta1, phi0, psi0, dx } => Ok(CtAngles {
            theta1,
            alpha: 0.5 * (phi0 + psi0),
            beta: 0.5 * (phi0 - psi0),
            dx,
            sign: h.sign,
        }),
        _ => Err(Error::NotContinuousTime(h.label.clone())),
    }
}

/// `(±i e^{i(kΔx+β)}, 1)/√2`: eigenvectors of `[[0, ie^{iγ}], [−ie^{−iγ}, 0]]`
/// for `±1`.
fn analytic_vectors(gamma: f64) -> (Spinor, Spinor) {
    let a = I * Complex64::from_polar(FRAC_1_SQRT_2, gamma);
    let one = ONE * FRAC_1_SQRT_2;
    (Spinor::new(a, one), Spinor::new(-a, one))
}

/// Branches continuous in `k`: `[(+λ(k), v₊), (−λ(k), v₋)]` with
/// `λ(k) = (θ1/2)cos(kΔx − α)` (signed, not sorted).
pub fn ct_branches(h: &KSpaceHamiltonian, k: f64) -> Result<[(f64, Spinor); 2]> {
    let a = ct_angles(h)?;
    let lambda = 0.5 * a.theta1 * (k * a.dx - a.alpha).cos();
    let (up, dn) = analytic_vectors(k * a.dx + a.beta);
    // printed orientation is +λ·(eigenvalue of the matrix above)
    let (vp, vm) = if a.sign > 0.0 { (up, dn) } else { (dn, up) };
    Ok([(lambda, vp), (-lambda, vm)])
}

pub fn ct_spectrum(h: &KSpaceHamiltonian, k: f64) -> Result<CtSpectrum> {
    let [(l0, v0), (l1, v1)] = ct_branches(h, k)?;
    let degenerate = (l0 - l1).abs() < 1e-12;
    let (lambda_plus, v_plus, lambda_minus, v_minus) =
        if l0 >= l1 || degenerate { (l0, v0, l1, v1) } else { (l1, v1, l0, v0) };
    Ok(CtSpectrum { lambda_plus, lambda_minus, v_plus, v_minus, degenerate })
}

/// `v v†`.
pub fn projector(v: &Spinor) -> Mat2 {
    Mat2::new(v.l * v.l.conj(), v.l * v.r.conj(), v.r * v.l.conj(), v.r * v.r.conj())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn herm_eigs(h: &Mat2) -> (f64, f64) {
        h.hermitian_eigenvalues()
    }

    #[test]
    fn zero_theta_gives_zero() {
        let h = ct_hamiltonian(0.0, 0.4, 1.0, 1.0).unwrap();
        for k in [-3.0, 0.0, 1.2] {
            assert_eq!(h.evaluate(k).max_abs(), 0.0);
        }
        assert_eq!(ctcs_hamiltonian(0.0, 0.3).evaluate(2.0).max_abs(), 0.0);
    }

    #[test]
    fn strauch_parameters() {
        let gamma = 1.0;
        let h = ct_hamiltonian(4.0 * gamma, PI / 2.0, -PI / 2.0, 1.0).unwrap();
        for k in [0.0, 0.3, -1.7] {
            let expected = (Mat2::identity() + Mat2::exp_i_sigma_z(2.0 * k)) * Mat2::sigma_x().scale_real(-gamma);
            assert!(h.evaluate(k).max_abs_diff(&expected) < 1e-14);
        }
        assert!(h.evaluate(0.0).max_abs_diff(&Mat2::sigma_x().scale_real(-2.0 * gamma)) < 1e-15);
    }

    #[test]
    fn eigenvalues_follow_cosine() {
        let (theta1, phi0, psi0, dx) = (2.3, 0.7, -1.9, 0.5);
        let h = ct_hamiltonian(theta1, phi0, psi0, dx).unwrap();
        let alpha = 0.5 * (phi0 + psi0);
        for j in 0..64 {
            let k = -PI / dx + j as f64 * 2.0 * PI / (64.0 * dx);
            let (lo, hi) = herm_eigs(&h.evaluate(k));
            let c = 0.5 * theta1 * (k * dx - alpha).cos().abs();
            assert!((hi - c).abs() < 1e-12 && (lo + c).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_special_points() {
        let (theta1, phi0, psi0, dx) = (1.5, 0.9, 0.3, 1.0);
        let alpha = 0.6;
        let h = ct_hamiltonian(theta1, phi0, psi0, dx).unwrap();
        let s = ct_spectrum(&h, alpha / dx).unwrap();
        assert!((s.lambda_plus - theta1 / 2.0).abs() < 1e-15);
        assert!((s.lambda_minus + theta1 / 2.0).abs() < 1e-15);
        let s = ct_spectrum(&h, (alpha + PI / 2.0) / dx).unwrap();
        assert!(s.degenerate);
        assert!(s.lambda_plus.abs() < 1e-12);
    }

    #[test]
    fn eigenpairs_and_projector_identity() {
        for h in [ct_hamiltonian(1.1, -0.4, 2.2, 0.7).unwrap(), ct_generator(1.1, -0.4, 2.2, 0.7).unwrap()] {
            for k in [-2.0, -0.3, 0.0, 0.8, 3.1] {
                let s = ct_spectrum(&h, k).unwrap();
                let m = h.evaluate(k);
                assert!((m * s.v_plus).max_abs_diff(&s.v_plus.scale(s.lambda_plus.into())) < 1e-12);
                assert!((m * s.v_minus).max_abs_diff(&s.v_minus.scale(s.lambda_minus.into())) < 1e-12);
                assert!(s.v_plus.dot(&s.v_minus).norm() < 1e-15);
                let back = projector(&s.v_plus).scale_real(s.lambda_plus)
                    + projector(&s.v_minus).scale_real(s.lambda_minus);
                assert!(back.max_abs_diff(&m) < 1e-12);
            }
        }
    }

    #[test]
    fn periodic_in_k() {
        let dx = 0.5;
        let h = ct_hamiltonian(1.3, 0.2, -0.8, dx).unwrap();
        for k in [-1.0, 0.4, 2.0] {
            assert!(h.evaluate(k + PI / dx).max_abs_diff(&h.evaluate(k)) < 1e-12);
        }
    }

    #[test]
    fn ctcs_eigenvalues() {
        let h = ctcs_hamiltonian(2.0, 0.0);
        for k in [-1.5, 0.5, 3.0] {
            let (lo, hi) = herm_eigs(&h.evaluate(k));
            assert!((hi - k.abs()).abs() < 1e-14 && (lo + k.abs()).abs() < 1e-14);
        }
        let psi0 = 0.0;
        assert!(ctcs_hamiltonian(2.0, psi0).evaluate(0.7).max_abs_diff(&Mat2::sigma_x().scale_real(-0.7)) < 1e-15);
    }

    #[test]
    fn spectrum_rejects_other_kinds() {
        assert!(matches!(ct_spectrum(&ctcs_hamiltonian(1.0, 0.0), 0.1), Err(Error::NotContinuousTime(_))));
    }
}
