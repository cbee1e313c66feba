//! Chebyshev interpolation helpers on [-1, 1].

use std::f64::consts::PI;

/// First-kind Chebyshev points, ordered from right to left.
pub fn nodes(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| (PI * (j as f64 + 0.5) / n as f64).cos())
        .collect()
}

/// Coefficients of the interpolant through values sampled at [`nodes`].
pub fn coefficients(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    for (k, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, v) in values.iter().enumerate() {
            acc += v * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos();
        }
        *slot = 2.0 * acc / n as f64;
    }
    if n > 0 {
        out[0] *= 0.5;
    }
    out
}

pub fn interpolate<F: FnMut(f64) -> f64>(mut f: F, n: usize) -> Vec<f64> {
    let vals: Vec<f64> = nodes(n).into_iter().map(&mut f).collect();
    coefficients(&vals)
}

/// Evaluates sum_k c_k T_k(t) by Clenshaw.
pub fn eval(coeffs: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs.first().copied().unwrap_or(0.0) + t * b1 - b2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_polynomial() {
        let c = interpolate(|x| 3.0 * x * x * x - x + 0.5, 6);
        assert!((c[0] - 0.5).abs() < 1e-14);
        assert!((c[3] - 0.75).abs() < 1e-14);
        for x in [-0.9, -0.1, 0.4, 1.0] {
            assert!((eval(&c, x) - (3.0 * x * x * x - x + 0.5)).abs() < 1e-13);
        }
    }
}
