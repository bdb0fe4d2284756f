//! Periodic one-dimensional lattice of two-component spinors.
//!
//! Transform conventions: the forward transform is the unnormalized sum
//! `Ψ̃(k_j) = Σ_n e^{-i k_j n Δx} Ψ(nΔx)` and the inverse carries `1/N`.
//! With these conventions the conditional shift has Fourier symbol
//! `e^{i k Δx σz}` exactly. Wavenumbers are wrapped into the Brillouin zone
//! `[-π/Δx, π/Δx)`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mat2::{Mat2, ZERO};

/// Amplitudes of the left- and right-moving internal states at one site.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Spinor {
    pub l: Complex64,
    pub r: Complex64,
}

impl Spinor {
    pub const fn new(l: Complex64, r: Complex64) -> Self {
        Spinor { l, r }
    }

    pub const fn zero() -> Self {
        Spinor { l: ZERO, r: ZERO }
    }

    pub fn left() -> Self {
        Spinor::new(1.0.into(), ZERO)
    }

    pub fn right() -> Self {
        Spinor::new(ZERO, 1.0.into())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.l.norm_sqr() + self.r.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        self.l.is_finite() && self.r.is_finite()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Spinor::new(self.l * s, self.r * s)
    }

    /// Hermitian inner product `⟨self|other⟩`.
    pub fn dot(&self, other: &Spinor) -> Complex64 {
        self.l.conj() * other.l + self.r.conj() * other.r
    }

    pub fn max_abs_diff(&self, other: &Spinor) -> f64 {
        (self.l - other.l).norm().max((self.r - other.r).norm())
    }
}

impl Add for Spinor {
    type Output = Spinor;

    fn add(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.l + rhs.l, self.r + rhs.r)
    }
}

impl Sub for Spinor {
    type Output = Spinor;

    fn sub(self, rhs: Spinor) -> Spinor {
        Spinor::new(self.l - rhs.l, self.r - rhs.r)
    }
}

impl Mul<Spinor> for Mat2 {
    type Output = Spinor;

    fn mul(self, v: Spinor) -> Spinor {
        let [l, r] = self.apply([v.l, v.r]);
        Spinor::new(l, r)
    }
}

/// Ring of `n_sites` sites with spacing `dx`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n_sites: usize,
    dx: f64,
}

impl Grid {
    pub fn new(n_sites: usize, dx: f64) -> Result<Self> {
        if n_sites < 2 || n_sites % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "n_sites must be even and >= 2, got {n_sites}"
            )));
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::InvalidGrid(format!("dx must be positive, got {dx}")));
        }
        Ok(Grid { n_sites, dx })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x(&self, site: usize) -> f64 {
        site as f64 * self.dx
    }

    /// Signed mode index for `j`, in `[-N/2, N/2)`.
    pub fn mode_index(&self, j: usize) -> i64 {
        let n = self.n_sites as i64;
        let j = j as i64;
        if j >= n / 2 {
            j - n
        } else {
            j
        }
    }

    /// Wavenumber of mode `j`, wrapped into `[-π/Δx, π/Δx)`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        2.0 * PI * self.mode_index(j) as f64 / (self.n_sites as f64 * self.dx)
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n_sites).map(|j| self.wavenumber(j)).collect()
    }

    /// `e^{-2πi m/N}` for `m = 0..N`; phases are looked up by `(j·n) mod N`
    /// so no large arguments reach `sin`/`cos`.
    fn twiddles(&self) -> Vec<Complex64> {
        let n = self.n_sites as f64;
        (0..self.n_sites)
            .map(|m| Complex64::from_polar(1.0, -2.0 * PI * m as f64 / n))
            .collect()
    }
}

/// Position-space walker state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinorField {
    grid: Grid,
    data: Vec<Spinor>,
}

impl SpinorField {
    pub fn zeros(grid: Grid) -> Self {
        SpinorField { grid, data: vec![Spinor::zero(); grid.n_sites] }
    }

    pub fn from_vec(grid: Grid, data: Vec<Spinor>) -> Result<Self> {
        if data.len() != grid.n_sites {
            return Err(Error::InvalidArgument(format!(
                "field has {} sites, grid has {}",
                data.len(),
                grid.n_sites
            )));
        }
        if let Some(i) = data.iter().position(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite amplitude at site {i}")));
        }
        Ok(SpinorField { grid, data })
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(usize) -> Spinor) -> Self {
        SpinorField { grid, data: (0..grid.n_sites).map(&mut f).collect() }
    }

    /// Single occupied site.
    pub fn delta(grid: Grid, site: usize, spinor: Spinor) -> Self {
        let mut field = SpinorField::zeros(grid);
        field.data[site % grid.n_sites] = spinor;
        field
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &[Spinor] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Spinor] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Spinor> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.data.iter().map(Spinor::norm_sqr).collect()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|_, v| v.scale(s))
    }

    pub fn map(&self, mut f: impl FnMut(usize, Spinor) -> Spinor) -> Self {
        SpinorField {
            grid: self.grid,
            data: self.data.iter().enumerate().map(|(i, &v)| f(i, v)).collect(),
        }
    }

    /// Applies the same 2x2 matrix at every site.
    pub fn apply_local(&self, m: &Mat2) -> Self {
        self.map(|_, v| *m * v)
    }

    pub fn normalized(&self) -> Self {
        let n = total_norm(self);
        if n == 0.0 {
            return self.clone();
        }
        self.scale((1.0 / n.sqrt()).into())
    }

    /// Largest component-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &SpinorField) -> f64 {
        assert_eq!(self.grid, other.grid, "fields on different grids");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    /// `sqrt(Σ |self - other|²)`.
    pub fn l2_distance(&self, other: &SpinorField) -> f64 {
        assert_eq!(self.grid, other.grid, "fields on different grids");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (*a - *b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn add(&self, other: &SpinorField) -> Result<SpinorField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self.map(|i, v| v + other.data[i]))
    }

    pub fn sub(&self, other: &SpinorField) -> Result<SpinorField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self.map(|i, v| v - other.data[i]))
    }
}

/// Mode-space walker state; entry `j` belongs to `grid.wavenumber(j)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KSpaceField {
    grid: Grid,
    data: Vec<Spinor>,
}

impl KSpaceField {
    pub fn from_vec(grid: Grid, data: Vec<Spinor>) -> Result<Self> {
        if data.len() != grid.n_sites {
            return Err(Error::InvalidArgument(format!(
                "k-field has {} modes, grid has {}",
                data.len(),
                grid.n_sites
            )));
        }
        Ok(KSpaceField { grid, data })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &[Spinor] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Spinor] {
        &mut self.data
    }

    pub fn wavenumber(&self, j: usize) -> f64 {
        self.grid.wavenumber(j)
    }
}

fn dft(grid: &Grid, input: &[Spinor], inverse: bool) -> Vec<Spinor> {
    let n = grid.n_sites;
    let w = grid.twiddles();
    let norm = if inverse { 1.0 / n as f64 } else { 1.0 };
    (0..n)
        .map(|out| {
            let mut acc = Spinor::zero();
            for (inp, v) in input.iter().enumerate() {
                let m = (out * inp) % n;
                let phase = if inverse { w[m].conj() } else { w[m] };
                acc.l += v.l * phase;
                acc.r += v.r * phase;
            }
            acc.scale(norm.into())
        })
        .collect()
}

pub fn dft_forward(field: &SpinorField) -> KSpaceField {
    KSpaceField { grid: field.grid, data: dft(&field.grid, &field.data, false) }
}

pub fn dft_inverse(kfield: &KSpaceField) -> SpinorField {
    SpinorField { grid: kfield.grid, data: dft(&kfield.grid, &kfield.data, true) }
}

/// Plain site sum `Σ (|l|² + |r|²)`, no `Δx` weight.
pub fn total_norm(field: &SpinorField) -> f64 {
    field.data.iter().map(Spinor::norm_sqr).sum()
}

/// How a mode-space matrix function acts on each mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum KMode {
    /// `Ψ̃(k) ← M(k) Ψ̃(k)`
    Multiply,
    /// `Ψ̃(k) ← exp(-i M(k) t) Ψ̃(k)`, `M(k)` must be Hermitian.
    Exponentiate(f64),
}

/// Relative Hermiticity tolerance for exponentiated operators.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Conjugates a per-mode 2x2 operator by the transform.
pub fn apply_kspace_op<F>(field: &SpinorField, op: F, mode: KMode) -> Result<SpinorField>
where
    F: Fn(f64) -> Mat2,
{
    let mut kfield = dft_forward(field);
    let grid = field.grid;
    for (j, v) in kfield.data.iter_mut().enumerate() {
        let m = op(grid.wavenumber(j));
        let action = match mode {
            KMode::Multiply => m,
            KMode::Exponentiate(t) => {
                let defect = m.hermiticity_defect();
                if defect > HERMITIAN_TOL * m.op_norm() {
                    return Err(Error::NonHermitian { deviation: defect });
                }
                m.exp_hermitian(t)
            }
        };
        *v = action * *v;
    }
    Ok(dft_inverse(&kfield))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::new(n, 1.0).unwrap()
    }

    #[test]
    fn grid_rejects_odd_or_tiny() {
        assert!(Grid::new(7, 1.0).is_err());
        assert!(Grid::new(0, 1.0).is_err());
        assert!(Grid::new(8, 0.0).is_err());
        assert!(Grid::new(8, -1.0).is_err());
        assert!(Grid::new(2, 0.5).is_ok());
    }

    #[test]
    fn wavenumbers_cover_brillouin_zone() {
        let g = Grid::new(8, 0.5).unwrap();
        let ks = g.wavenumbers();
        let lim = PI / 0.5;
        assert!(ks.iter().all(|&k| k >= -lim - 1e-15 && k < lim));
        assert!((ks[4] + lim).abs() < 1e-15);
        assert_eq!(ks[0], 0.0);
    }

    #[test]
    fn delta_transforms_to_constant() {
        let g = grid(8);
        let k = dft_forward(&SpinorField::delta(g, 0, Spinor::left()));
        for v in k.data() {
            assert!((v.l - Complex64::new(1.0, 0.0)).norm() < 1e-15);
            assert_eq!(v.r, ZERO);
        }
    }

    #[test]
    fn plane_wave_concentrates_on_one_mode() {
        let g = grid(8);
        let k1 = g.wavenumber(1);
        let f = SpinorField::from_fn(g, |n| {
            Spinor::new(Complex64::from_polar(1.0, k1 * g.x(n)), ZERO)
        });
        let kf = dft_forward(&f);
        for (j, v) in kf.data().iter().enumerate() {
            let expected = if j == 1 { 8.0 } else { 0.0 };
            assert!((v.l - Complex64::new(expected, 0.0)).norm() < 1e-13);
        }
    }

    #[test]
    fn inverse_of_constant_is_delta() {
        let g = grid(8);
        let kf = KSpaceField::from_vec(g, vec![Spinor::left(); 8]).unwrap();
        let f = dft_inverse(&kf);
        assert!(f.max_abs_diff(&SpinorField::delta(g, 0, Spinor::left())) < 1e-15);
    }

    #[test]
    fn zero_field_stays_zero() {
        let g = grid(16);
        let kf = KSpaceField::from_vec(g, vec![Spinor::zero(); 16]).unwrap();
        assert_eq!(total_norm(&dft_inverse(&kf)), 0.0);
    }

    #[test]
    fn norm_is_quadratic() {
        let g = grid(8);
        let f = SpinorField::delta(g, 3, Spinor::left());
        assert_eq!(total_norm(&f), 1.0);
        assert!((total_norm(&f.scale(2.0.into())) - 4.0).abs() < 1e-15);
    }

    #[test]
    fn from_vec_rejects_nan() {
        let g = grid(2);
        let bad = vec![Spinor::new(f64::NAN.into(), ZERO), Spinor::zero()];
        assert!(SpinorField::from_vec(g, bad).is_err());
    }

    #[test]
    fn identity_and_zero_operators() {
        let g = grid(16);
        let f = SpinorField::from_fn(g, |n| {
            Spinor::new(Complex64::new(n as f64, 1.0), Complex64::new(-0.5, n as f64 * 0.1))
        });
        let same = apply_kspace_op(&f, |_| Mat2::identity(), KMode::Multiply).unwrap();
        assert!(same.max_abs_diff(&f) < 1e-12);
        let same = apply_kspace_op(&f, |_| Mat2::zero(), KMode::Exponentiate(2.5)).unwrap();
        assert!(same.max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn exponentiate_rejects_non_hermitian() {
        let g = grid(4);
        let f = SpinorField::delta(g, 0, Spinor::left());
        let err = apply_kspace_op(&f, |_| Mat2::sigma_y().scale(crate::mat2::I), KMode::Exponentiate(1.0));
        assert!(matches!(err, Err(Error::NonHermitian { .. })));
    }
}
