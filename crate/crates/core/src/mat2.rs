//! Dense 2x2 complex matrices.
//!
//! Everything in the walk that acts on the internal (L/R) space is a 2x2
//! matrix, so the closed forms below (Pauli decomposition, operator norm,
//! exponential of a Hermitian matrix) replace general-purpose linear algebra.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Row-major 2x2 complex matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub const fn identity() -> Self {
        Mat2::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn zero() -> Self {
        Mat2::new(ZERO, ZERO, ZERO, ZERO)
    }

    pub const fn sigma_x() -> Self {
        Mat2::new(ZERO, ONE, ONE, ZERO)
    }

    pub const fn sigma_y() -> Self {
        Mat2::new(ZERO, Complex64::new(0.0, -1.0), I, ZERO)
    }

    pub const fn sigma_z() -> Self {
        Mat2::new(ONE, ZERO, ZERO, Complex64::new(-1.0, 0.0))
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Mat2::new(a, ZERO, ZERO, d)
    }

    /// `a0 I + ax σx + ay σy + az σz` with complex coefficients.
    pub fn from_pauli(a0: Complex64, ax: Complex64, ay: Complex64, az: Complex64) -> Self {
        Mat2::new(a0 + az, ax - I * ay, ax + I * ay, a0 - az)
    }

    /// Coefficients `[a0, ax, ay, az]` of the Pauli expansion.
    pub fn pauli_components(&self) -> [Complex64; 4] {
        let m = &self.0;
        [
            (m[0][0] + m[1][1]) * 0.5,
            (m[0][1] + m[1][0]) * 0.5,
            (m[1][0] - m[0][1]) * (-0.5 * I),
            (m[0][0] - m[1][1]) * 0.5,
        ]
    }

    /// `exp(i a σz)`, the Fourier symbol of an `a/Δx`-momentum shift.
    pub fn exp_i_sigma_z(a: f64) -> Self {
        Mat2::diag(Complex64::from_polar(1.0, a), Complex64::from_polar(1.0, -a))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2::new(m[0][0].conj(), m[1][0].conj(), m[0][1].conj(), m[1][1].conj())
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        (*self - *other).max_abs()
    }

    /// Operator (spectral) norm: the largest singular value.
    pub fn op_norm(&self) -> f64 {
        let g = self.adjoint() * *self;
        let p = g.0[0][0].re;
        let r = g.0[1][1].re;
        let q = g.0[0][1].norm();
        let half = 0.5 * (p - r);
        let top = 0.5 * (p + r) + (half * half + q * q).sqrt();
        top.max(0.0).sqrt()
    }

    /// `‖H - H†‖` in operator norm.
    pub fn hermiticity_defect(&self) -> f64 {
        (*self - self.adjoint()).op_norm()
    }

    /// Relative Hermiticity test: `‖H - H†‖ ≤ tol·‖H‖`.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol * self.op_norm()
    }

    /// `max |U†U - I|` entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        (self.adjoint() * *self - Mat2::identity()).max_abs()
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = Mat2::identity();
        let mut base = *self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base;
            }
            base = base * base;
            e >>= 1;
        }
        result
    }

    /// Eigenvalues `(low, high)` of the Hermitian part of the matrix.
    pub fn hermitian_eigenvalues(&self) -> (f64, f64) {
        let [a0, ax, ay, az] = self.pauli_components();
        let r = (ax.re * ax.re + ay.re * ay.re + az.re * az.re).sqrt();
        (a0.re - r, a0.re + r)
    }

    /// `exp(-i H t)` for Hermitian `H = a0 + a·σ`:
    /// `e^{-i a0 t} (cos(|a|t) - i sin(|a|t) â·σ)`.
    ///
    /// Only the Hermitian part of `self` is used.
    pub fn exp_hermitian(&self, t: f64) -> Self {
        let [a0, ax, ay, az] = self.pauli_components();
        let (ax, ay, az) = (ax.re, ay.re, az.re);
        let r = (ax * ax + ay * ay + az * az).sqrt();
        let phase = Complex64::from_polar(1.0, -a0.re * t);
        let c = (r * t).cos();
        // sin(rt)/r, stable as r -> 0
        let s_over_r = if r * t.abs() < 1e-8 {
            t * (1.0 - (r * t).powi(2) / 6.0)
        } else {
            (r * t).sin() / r
        };
        let m = Mat2::from_pauli(
            c.into(),
            Complex64::new(0.0, -s_over_r * ax),
            Complex64::new(0.0, -s_over_r * ay),
            Complex64::new(0.0, -s_over_r * az),
        );
        m.scale(phase)
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
    }
}

impl Default for Mat2 {
    fn default() -> Self {
        Mat2::zero()
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Add for Mat2 {
    type Output = Mat2;

    fn add(self, rhs: Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2::new(a[0][0] + b[0][0], a[0][1] + b[0][1], a[1][0] + b[1][0], a[1][1] + b[1][1])
    }
}

impl AddAssign for Mat2 {
    fn add_assign(&mut self, rhs: Mat2) {
        *self = *self + rhs;
    }
}

impl Sub for Mat2 {
    type Output = Mat2;

    fn sub(self, rhs: Mat2) -> Mat2 {
        self + (-rhs)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;

    fn neg(self) -> Mat2 {
        self.scale_real(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (Mat2::sigma_x(), Mat2::sigma_y(), Mat2::sigma_z());
        assert!((x * x).max_abs_diff(&Mat2::identity()) == 0.0);
        assert!((x * y).max_abs_diff(&z.scale(I)) == 0.0);
        assert!((y * z).max_abs_diff(&x.scale(I)) == 0.0);
        assert!((z * x).max_abs_diff(&y.scale(I)) == 0.0);
    }

    #[test]
    fn pauli_components_round_trip() {
        let m = Mat2::new(
            Complex64::new(0.3, -1.0),
            Complex64::new(2.0, 0.5),
            Complex64::new(-0.7, 0.1),
            Complex64::new(1.5, 0.25),
        );
        let [a0, ax, ay, az] = m.pauli_components();
        assert!(Mat2::from_pauli(a0, ax, ay, az).max_abs_diff(&m) < 1e-15);
    }

    #[test]
    fn op_norm_of_known_matrices() {
        assert!((Mat2::sigma_y().op_norm() - 1.0).abs() < 1e-15);
        assert!((Mat2::from_real(3.0, 0.0, 0.0, -5.0).op_norm() - 5.0).abs() < 1e-15);
        // rank-one [[1,1],[1,1]] has singular value 2
        assert!((Mat2::from_real(1.0, 1.0, 1.0, 1.0).op_norm() - 2.0).abs() < 1e-15);
        assert_eq!(Mat2::zero().op_norm(), 0.0);
    }

    #[test]
    fn exp_hermitian_matches_series() {
        let h = Mat2::from_pauli(0.4.into(), 0.3.into(), (-1.1).into(), 0.8.into());
        let t = 0.7;
        // truncated Taylor series of exp(-iHt)
        let a = h.scale(Complex64::new(0.0, -t));
        let mut term = Mat2::identity();
        let mut sum = Mat2::identity();
        for j in 1..40 {
            term = (term * a).scale_real(1.0 / j as f64);
            sum += term;
        }
        assert!(h.exp_hermitian(t).max_abs_diff(&sum) < 1e-14);
        assert!(h.exp_hermitian(t).unitarity_defect() < 1e-14);
    }

    #[test]
    fn exp_of_zero_is_identity() {
        assert_eq!(Mat2::zero().exp_hermitian(3.0).max_abs_diff(&Mat2::identity()), 0.0);
    }

    #[test]
    fn pow_matches_repeated_product() {
        let m = Mat2::new(
            Complex64::new(0.1, 0.2),
            Complex64::new(0.3, -0.4),
            Complex64::new(-0.5, 0.6),
            Complex64::new(0.7, 0.8),
        );
        let mut p = Mat2::identity();
        for n in 0..9 {
            assert!(m.pow(n).max_abs_diff(&p) < 1e-14);
            p = p * m;
        }
    }

    #[test]
    fn hermitian_eigenvalues_of_pauli_combination() {
        let h = Mat2::from_pauli(1.0.into(), 0.0.into(), 3.0.into(), 4.0.into());
        let (lo, hi) = h.hermitian_eigenvalues();
        assert!((lo + 4.0).abs() < 1e-14 && (hi - 6.0).abs() < 1e-14);
    }
}
