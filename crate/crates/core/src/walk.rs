//! The coined walk `Ψ(t+Δt) = S·C·Ψ(t)` and its finite-step generator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coin::Unitary2;
use crate::error::{Error, Result};
use crate::lattice::{Grid, Spinor, SpinorField};
use crate::mat2::{Mat2, I};

/// Everything needed to advance a field by one skipped block `(SC)ⁿ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepPlan {
    pub coin: Unitary2,
    pub skip_n: u32,
    pub dt: f64,
    pub grid: Grid,
}

impl StepPlan {
    pub fn new(coin: Unitary2, skip_n: u32, dt: f64, grid: Grid) -> Result<Self> {
        if skip_n == 0 {
            return Err(Error::InvalidArgument("skip_n must be at least 1".into()));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        Ok(StepPlan { coin, skip_n, dt, grid })
    }
}

/// `L` reads from the right neighbour, `R` from the left; periodic.
pub fn apply_shift(field: &SpinorField) -> SpinorField {
    let n = field.len();
    let d = field.data();
    field.map(|x, _| Spinor::new(d[(x + 1) % n].l, d[(x + n - 1) % n].r))
}

/// Coin at every site, then shift.
pub fn step(field: &SpinorField, coin: &Unitary2) -> SpinorField {
    apply_shift(&field.apply_local(coin.mat()))
}

pub fn evolve(field: &SpinorField, coin: &Unitary2, steps: usize) -> SpinorField {
    let mut f = field.clone();
    for _ in 0..steps {
        f = step(&f, coin);
    }
    f
}

/// Fourier symbol of one coined step at wavenumber `k`.
pub fn step_symbol(k: f64, coin: &Unitary2, dx: f64) -> Mat2 {
    Mat2::exp_i_sigma_z(k * dx) * *coin.mat()
}

/// `i[(e^{ikΔxσz}C)ⁿ − I]/(nΔt)`, exact at finite `Δt`.
pub fn generator_matrix(k: f64, coin: &Unitary2, n: u32, dx: f64, dt: f64) -> Mat2 {
    debug_assert!(dt > 0.0 && n >= 1);
    let block = step_symbol(k, coin, dx).pow(n) - Mat2::identity();
    block.scale(I / Complex64::new(n as f64 * dt, 0.0))
}

/// `(evolve(field, C, n) − field)/(nΔt)`.
pub fn discrete_derivative(field: &SpinorField, plan: &StepPlan) -> Result<SpinorField> {
    if field.grid() != &plan.grid {
        return Err(Error::GridMismatch);
    }
    let moved = evolve(field, &plan.coin, plan.skip_n as usize);
    let inv = 1.0 / (plan.skip_n as f64 * plan.dt);
    Ok(moved.sub(field)?.scale(inv.into()))
}
