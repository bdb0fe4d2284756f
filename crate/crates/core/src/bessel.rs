//! Integer-order Bessel functions of the first kind.
//!
//! Miller's algorithm: run `J_{k-1} = (2k/z)J_k − J_{k+1}` downward from far
//! above the wanted order, then fix the scale with `J_0² + 2Σ J_k² = 1` and
//! the sign with `J_0 + 2Σ J_{2k} = 1`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ORDER: u64 = 1_000_000;
pub const MAX_ARG: f64 = 1e4;

const RESCALE_AT: f64 = 1e100;

fn start_index(max_order: usize, z: f64) -> usize {
    max_order.max(z.ceil() as usize) + 40 + (10.0 * z.cbrt()).ceil() as usize
}

/// `J_0(z) … J_{max_order}(z)` for `z > 0`.
fn miller(max_order: usize, z: f64) -> Vec<f64> {
    let start = start_index(max_order, z);
    let mut out = vec![0.0; max_order + 1];
    let mut above = 0.0;
    let mut cur = 1e-30;
    let mut sum_sq = 0.0;
    let mut sum_even = 0.0;
    for k in (0..=start).rev() {
        if k <= max_order {
            out[k] = cur;
        }
        if k == 0 {
            sum_sq += cur * cur;
            sum_even += cur;
            break;
        }
        sum_sq += 2.0 * cur * cur;
        if k % 2 == 0 {
            sum_even += 2.0 * cur;
        }
        let below = 2.0 * k as f64 / z * cur - above;
        above = cur;
        cur = below;
        if cur.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            cur *= s;
            above *= s;
            sum_sq *= s * s;
            sum_even *= s;
            for v in out.iter_mut().skip(k.saturating_sub(1)) {
                *v *= s;
            }
        }
    }
    let norm = sum_even.signum() / sum_sq.sqrt();
    out.iter_mut().for_each(|v| *v *= norm);
    out
}

fn check_args(order: u64, z: f64) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::OutOfRange(format!("|order| = {order} exceeds {MAX_ORDER}")));
    }
    if !(z.abs() <= MAX_ARG) {
        return Err(Error::OutOfRange(format!("|z| = {z} exceeds {MAX_ARG}")));
    }
    Ok(())
}

/// `J_0(z) … J_{max_order}(z)`; negative orders follow from `J_{−n} = (−1)ⁿJ_n`.
pub fn bessel_j_table(max_order: usize, z: f64) -> Result<Vec<f64>> {
    check_args(max_order as u64, z)?;
    if z == 0.0 {
        let mut t = vec![0.0; max_order + 1];
        t[0] = 1.0;
        return Ok(t);
    }
    let mut t = miller(max_order, z.abs());
    if z < 0.0 {
        t.iter_mut().skip(1).step_by(2).for_each(|v| *v = -*v);
    }
    Ok(t)
}

pub fn bessel_j(order: i64, z: f64) -> Result<f64> {
    let n = order.unsigned_abs();
    check_args(n, z)?;
    let v = bessel_j_table(n as usize, z)?[n as usize];
    Ok(if order < 0 && n % 2 == 1 { -v } else { v })
}

/// Lookup into a non-negative table using `J_{−n} = (−1)ⁿJ_n`; zero beyond it.
pub fn table_lookup(table: &[f64], order: i64) -> f64 {
    let n = order.unsigned_abs() as usize;
    match table.get(n) {
        Some(&v) if order < 0 && n % 2 == 1 => -v,
        Some(&v) => v,
        None => 0.0,
    }
}

/// `|lhs − rhs|` for the addition theorem
/// `(−1)ⁿ Σ_j (−i)^j J_j(z cos α) J_{n−j}(z sin α) = iⁿ e^{iαn} J_n(z)`.
pub fn graf_convolution_check(alpha: f64, z: f64, n: i64) -> Result<f64> {
    if !(z.abs() <= 100.0) {
        return Err(Error::OutOfRange(format!("graf check needs |z| <= 100, got {z}")));
    }
    let reach = n.unsigned_abs() as usize + z.abs().ceil() as usize + 60;
    let tc = bessel_j_table(reach, z * alpha.cos())?;
    let ts = bessel_j_table(2 * reach, z * alpha.sin())?;
    let minus_i = Complex64::new(0.0, -1.0);
    let reach = reach as i64;
    let mut lhs = Complex64::new(0.0, 0.0);
    for j in -reach..=reach {
        let term = table_lookup(&tc, j) * table_lookup(&ts, n - j);
        lhs += minus_i.powi(j as i32) * term;
    }
    if n % 2 != 0 {
        lhs = -lhs;
    }
    let rhs = Complex64::new(0.0, 1.0).powi(n as i32)
        * Complex64::from_polar(1.0, alpha * n as f64)
        * bessel_j(n, z)?;
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    /// `(1/π)∫₀^π cos(nτ − z sin τ) dτ` by the trapezoid rule, which is
    /// spectrally accurate for this periodic integrand.
    fn integral(n: i64, z: f64) -> f64 {
        let m = 4000;
        let h = PI / m as f64;
        let f = |tau: f64| (n as f64 * tau - z * tau.sin()).cos();
        let inner: f64 = (1..m).map(|j| f(j as f64 * h)).sum();
        (0.5 * (f(0.0) + f(PI)) + inner) * h / PI
    }

    #[test]
    fn values_at_zero() {
        assert_eq!(bessel_j(0, 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(1, 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(-3, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn reference_values() {
        // reference values (scipy.special.jv)
        let cases = [
            (0, 1.0, 0.765_197_686_557_966_6),
            (1, 1.0, 0.440_050_585_744_933_5),
            (0, 10.0, -0.245_935_764_451_348_3),
            (5, 10.0, -0.234_061_528_186_793_6),
            (10, 10.0, 0.207_486_106_633_358_9),
            (2, 2.404_825_557_695_773, 0.431_754_807_019_680_6),
        ];
        for (n, z, v) in cases {
            assert!((bessel_j(n, z).unwrap() - v).abs() < 1e-13, "J_{n}({z})");
        }
    }

    #[test]
    fn matches_integral_representation() {
        for &z in &[0.3, 1.7, 6.0, 25.0, 80.0] {
            for n in [-7, -1, 0, 2, 5, 13, 40] {
                let d = (bessel_j(n, z).unwrap() - integral(n, z)).abs();
                assert!(d < 1e-12, "J_{n}({z}) off by {d:e}");
            }
        }
    }

    #[test]
    fn symmetry_in_order_and_argument() {
        for n in 0..9i64 {
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert_eq!(bessel_j(-n, 3.3).unwrap(), s * bessel_j(n, 3.3).unwrap());
            assert!((bessel_j(n, -3.3).unwrap() - s * bessel_j(n, 3.3).unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn sum_of_squares_is_one() {
        for &z in &[0.5, 2.0, 10.0] {
            let t = bessel_j_table(200, z).unwrap();
            let s = t[0] * t[0] + 2.0 * t[1..].iter().map(|v| v * v).sum::<f64>();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn large_argument_and_order() {
        assert!((bessel_j(0, 1000.0).unwrap() - integral(0, 1000.0)).abs() < 1e-10);
        assert!(bessel_j(500, 10.0).unwrap().abs() < 1e-300);
        assert!(bessel_j(0, 2e4).is_err());
        assert!(bessel_j(2_000_000, 1.0).is_err());
    }

    #[test]
    fn graf_examples() {
        for n in -4..=4 {
            assert!(graf_convolution_check(0.0, 3.0, n).unwrap() <= 1e-12);
            assert!(graf_convolution_check(1.1, 0.0, n).unwrap() <= 1e-15);
        }
        assert!(graf_convolution_check(PI / 4.0, 2.0, 3).unwrap() <= 1e-10);
        assert!(graf_convolution_check(2.5, 17.0, -6).unwrap() <= 1e-10);
        assert!(graf_convolution_check(0.1, 200.0, 1).is_err());
    }
}
