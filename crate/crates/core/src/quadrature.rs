//! Double-exponential quadrature used as an independent oracle for operator entries.

use crate::error::{Error, Result};
use crate::ultraspherical::{eval_poly, BasisParam};
use std::f64::consts::FRAC_PI_2;

const MAX_LEVEL: usize = 12;
const MIN_LEVEL: usize = 3;
const T_MAX: f64 = 6.5;

/// Integrates f over [lo, hi] by tanh-sinh quadrature.
///
/// The integrand receives `(y, y − lo, hi − y)` with both distances computed
/// without cancellation, so endpoint singularities can be evaluated accurately.
pub fn tanh_sinh<F>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64, f64, f64) -> f64,
{
    if !(hi > lo) {
        return Ok(0.0);
    }
    let half = 0.5 * (hi - lo);
    let width = hi - lo;
    let node_sum = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (cu * cu);
        if t == 0.0 {
            return w * f(lo + half, half, half);
        }
        // 1 − tanh(u) without cancellation
        let d = half * (-u).exp() / cu;
        if d <= 0.0 || w == 0.0 {
            return 0.0;
        }
        w * (f(lo + d, d, width - d) + f(hi - d, width - d, d))
    };
    let mut h = 1.0;
    let mut sum = 0.0;
    let mut k = 0;
    while k as f64 * h <= T_MAX {
        sum += node_sum(k as f64 * h);
        k += 1;
    }
    let mut estimate = half * h * sum;
    let mut err = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut k = 1usize;
        while k as f64 * h <= T_MAX {
            sum += node_sum(k as f64 * h);
            k += 2;
        }
        let next = half * h * sum;
        err = (next - estimate).abs();
        estimate = next;
        if !estimate.is_finite() {
            return Err(Error::Quadrature { estimate: f64::NAN });
        }
        if level >= MIN_LEVEL && err <= tol.max(1e-15 * estimate.abs()) {
            return Ok(estimate);
        }
    }
    Err(Error::Quadrature { estimate: err })
}

/// ∫_{−1}^{1} |x−y|^α (1−y²)^{λ−1/2} f(y) dy, split at y = x when |x| < 1.
pub fn kernel_integral<F>(alpha: f64, basis: BasisParam, x: f64, f: F, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let p = basis.lambda() - 0.5;
    let pow = |d: f64| if alpha == 0.0 { 1.0 } else { d.powf(alpha) };
    if x <= -1.0 || x >= 1.0 {
        return tanh_sinh(
            |y, dl, dr| pow((x - y).abs()) * (dl * dr).powf(p) * f(y),
            -1.0,
            1.0,
            tol,
        );
    }
    let (one_minus_x, one_plus_x) = (1.0 - x, 1.0 + x);
    let left = tanh_sinh(
        |y, dl, dr| pow(dr) * (dl * (one_minus_x + dr)).powf(p) * f(y),
        -1.0,
        x,
        tol,
    )?;
    let right = tanh_sinh(
        |y, dl, dr| pow(dl) * ((one_plus_x + dl) * dr).powf(p) * f(y),
        x,
        1.0,
        tol,
    )?;
    Ok(left + right)
}

/// Q^α[w C_n^{(λ)}](x) by quadrature, absolute tolerance 1e−10.
pub fn quadrature_oracle(alpha: f64, basis: BasisParam, n: usize, x: f64) -> Result<f64> {
    kernel_integral(alpha, basis, x, |y| eval_poly(n, basis, y), 1e-10)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_integrals() {
        let flat = BasisParam::new(0.5).unwrap();
        assert!((quadrature_oracle(1.0, flat, 0, 0.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((quadrature_oracle(2.0, flat, 0, 0.0).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        let b = BasisParam::new(-0.25).unwrap();
        assert!(quadrature_oracle(0.5, b, 1, 0.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        for l in [-0.45, 0.05, 1.3] {
            let b = BasisParam::new(l).unwrap();
            let got = kernel_integral(0.0, b, 0.3, |_| 1.0, 1e-12).unwrap();
            assert!((got - b.weight_integral()).abs() < 1e-10, "{l}: {got}");
        }
    }
}
