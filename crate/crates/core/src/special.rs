//! Gamma-family functions and the Gauss hypergeometric function.

use crate::chebyshev;
use crate::error::{Error, Result};
use std::f64::consts::PI;

pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// ln|Γ(x)| and the sign of Γ(x).
pub fn ln_gamma(x: f64) -> (f64, f64) {
    let (v, s) = libm::lgamma_r(x);
    (v, if s < 0 { -1.0 } else { 1.0 })
}

/// 1/Γ(x), zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if nonpositive_integer(x).is_some() {
        return 0.0;
    }
    let g = gamma(x);
    if g.is_finite() {
        1.0 / g
    } else {
        let (l, s) = ln_gamma(x);
        s * (-l).exp()
    }
}

pub(crate) fn nonpositive_integer(x: f64) -> Option<usize> {
    let r = x.round();
    if r <= 0.0 && (x - r).abs() <= 1e-12 * (1.0 + r.abs()) {
        Some((-r) as usize)
    } else {
        None
    }
}

/// Rising factorial (x)_n.
pub fn pochhammer(x: f64, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, k| acc * (x + k as f64))
}

pub fn beta_fn(x: f64, y: f64) -> Result<f64> {
    if nonpositive_integer(x).is_some() || nonpositive_integer(y).is_some() {
        return Err(Error::Domain(format!("beta({x}, {y}) has a pole")));
    }
    if nonpositive_integer(x + y).is_some() {
        return Ok(0.0);
    }
    if x.abs() < 170.0 && y.abs() < 170.0 && (x + y).abs() < 170.0 {
        let v = gamma(x) * gamma(y) / gamma(x + y);
        if v.is_finite() && v != 0.0 {
            return Ok(v);
        }
    }
    let (lx, sx) = ln_gamma(x);
    let (ly, sy) = ln_gamma(y);
    let (lxy, sxy) = ln_gamma(x + y);
    Ok(sx * sy * sxy * (lx + ly - lxy).exp())
}

pub fn digamma(mut x: f64) -> f64 {
    if nonpositive_integer(x).is_some() {
        return f64::NAN;
    }
    let mut acc = 0.0;
    if x < 0.5 {
        // reflection
        acc -= PI / (PI * x).tan();
        x = 1.0 - x;
    }
    while x < 10.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let r = 1.0 / (x * x);
    let tail = r
        * (1.0 / 12.0
            - r * (1.0 / 120.0
                - r * (1.0 / 252.0 - r * (1.0 / 240.0 - r * (1.0 / 132.0 - r * 691.0 / 32760.0)))));
    acc + x.ln() - 0.5 / x - tail
}

const SERIES_MAX_TERMS: usize = 20_000;

fn series(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut quiet = 0;
    for k in 0..SERIES_MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            quiet += 1;
            if quiet >= 2 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
        if term == 0.0 {
            return Ok(sum);
        }
    }
    Err(Error::Accuracy {
        achieved: (term / sum).abs(),
    })
}

fn terminating(a: f64, b: f64, c: f64, n: usize, z: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 0..n {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
    }
    sum
}

fn polynomial_degree(a: f64, b: f64) -> Option<usize> {
    match (nonpositive_integer(a), nonpositive_integer(b)) {
        (Some(m), Some(n)) => Some(m.min(n)),
        (Some(m), None) => Some(m),
        (None, Some(n)) => Some(n),
        (None, None) => None,
    }
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) for real z ≤ 1.
///
/// Terminating series are summed exactly for any z. Otherwise the power series
/// is used for |z| ≤ 1/2, the 1−z connection formulas on (1/2, 1) (with the
/// logarithmic forms when c−a−b is an integer), Pfaff's transformation for
/// z < −1/2 and Gauss's theorem at z = 1.
pub fn gauss_2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(Error::Domain("non-finite argument".into()));
    }
    if let Some(n) = polynomial_degree(a, b) {
        if nonpositive_integer(c).is_some_and(|m| m < n) {
            return Err(Error::Domain(format!("c = {c} is a pole of the series")));
        }
        return Ok(terminating(a, b, c, n, z));
    }
    if nonpositive_integer(c).is_some() {
        return Err(Error::Domain(format!("c = {c} is a nonpositive integer")));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z.abs() <= 0.5 {
        return series(a, b, c, z);
    }
    if z < -0.5 {
        let w = z / (z - 1.0);
        return Ok((1.0 - z).powf(-a) * gauss_2f1(a, c - b, c, w)?);
    }
    if z > 1.0 {
        return Err(Error::Domain(format!(
            "z = {z} > 1 is outside the real domain"
        )));
    }
    let d = c - a - b;
    if z == 1.0 {
        if d <= 0.0 {
            return Err(Error::Domain("divergent at z = 1 (c - a - b <= 0)".into()));
        }
        return Ok(gamma(c) * gamma(d) * rgamma(c - a) * rgamma(c - b));
    }
    let w = 1.0 - z;
    let m = d.round();
    if (d - m).abs() < 1e-8 {
        if m >= 0.0 {
            return log_case(a, b, m as usize, w);
        }
        // Euler: F(a,b;c;z) = (1-z)^{c-a-b} F(c-a, c-b; c; z)
        let (a2, b2) = (c - a, c - b);
        if let Some(n) = polynomial_degree(a2, b2) {
            return Ok(w.powf(d) * terminating(a2, b2, c, n, z));
        }
        return Ok(w.powf(d) * log_case(a2, b2, (-m) as usize, w)?);
    }
    let t1 = gamma(c) * gamma(d) * rgamma(c - a) * rgamma(c - b) * gauss_2f1(a, b, 1.0 - d, w)?;
    let t2 = w.powf(d)
        * gamma(c)
        * gamma(-d)
        * rgamma(a)
        * rgamma(b)
        * gauss_2f1(c - a, c - b, 1.0 + d, w)?;
    Ok(t1 + t2)
}

// F(a, b; a+b+m; 1-w) for integer m >= 0 and w in (0, 1/2).
fn log_case(a: f64, b: f64, m: usize, w: f64) -> Result<f64> {
    let mf = m as f64;
    let lw = w.ln();
    let mut finite = 0.0;
    if m > 0 {
        let pre = gamma(mf) * gamma(a + b + mf) * rgamma(a + mf) * rgamma(b + mf);
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 0..m - 1 {
            let nf = n as f64;
            term *= (a + nf) * (b + nf) / ((nf + 1.0) * (1.0 - mf + nf)) * w;
            sum += term;
        }
        finite = pre * sum;
    }
    let pre = gamma(a + b + mf) * rgamma(a) * rgamma(b);
    if pre == 0.0 {
        return Ok(finite);
    }
    let mut psi1 = digamma(1.0);
    let mut psi_m = digamma(mf + 1.0);
    let mut psi_a = digamma(a + mf);
    let mut psi_b = digamma(b + mf);
    let mut coef = 1.0 / gamma(mf + 1.0);
    let mut sum = 0.0;
    let mut quiet = 0;
    let mut converged = false;
    for n in 0..SERIES_MAX_TERMS {
        let nf = n as f64;
        let t = coef * (lw - psi1 - psi_m + psi_a + psi_b);
        sum += t;
        if t.abs() <= 1e-17 * sum.abs() || t == 0.0 {
            quiet += 1;
            if quiet >= 2 {
                converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
        coef *= (a + mf + nf) * (b + mf + nf) / ((nf + 1.0) * (nf + mf + 1.0)) * w;
        psi1 += 1.0 / (nf + 1.0);
        psi_m += 1.0 / (nf + mf + 1.0);
        psi_a += 1.0 / (a + mf + nf);
        psi_b += 1.0 / (b + mf + nf);
    }
    if !converged {
        return Err(Error::Accuracy { achieved: f64::NAN });
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    Ok(finite - sign * w.powi(m as i32) * pre * sum)
}

/// Polynomial representation in z of a (possibly truncated) ₂F₁.
#[derive(Debug, Clone, PartialEq)]
pub enum HypergeomRepr {
    /// Σ c_j z^j.
    Monomial(Vec<f64>),
    /// Σ c_k T_k(2z − 1), a Chebyshev series on z ∈ [0, 1].
    Chebyshev01(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypergeomPoly {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub repr: HypergeomRepr,
    /// Maximum deviation from ₂F₁ on z ∈ [0, 1]; zero when exact.
    pub max_error: f64,
}

impl HypergeomPoly {
    pub fn is_exact(&self) -> bool {
        matches!(self.repr, HypergeomRepr::Monomial(_)) && self.max_error == 0.0
    }

    pub fn degree(&self) -> usize {
        match &self.repr {
            HypergeomRepr::Monomial(c) | HypergeomRepr::Chebyshev01(c) => c.len().saturating_sub(1),
        }
    }

    pub fn eval(&self, z: f64) -> f64 {
        match &self.repr {
            HypergeomRepr::Monomial(c) => c.iter().rev().fold(0.0, |acc, &v| acc * z + v),
            HypergeomRepr::Chebyshev01(c) => chebyshev::eval(c, 2.0 * z - 1.0),
        }
    }

    /// Monomial coefficients in z. Exact for the terminating case; the
    /// Chebyshev conversion is ill-conditioned beyond moderate degrees.
    pub fn coeffs_in_z(&self) -> Vec<f64> {
        match &self.repr {
            HypergeomRepr::Monomial(c) => c.clone(),
            HypergeomRepr::Chebyshev01(c) => {
                // T_k(2z-1) by the three-term recurrence on monomial vectors
                let n = c.len();
                let mut out = vec![0.0; n];
                let mut t_prev = vec![0.0; n + 1];
                let mut t_cur = vec![0.0; n + 1];
                t_prev[0] = 1.0;
                t_cur[0] = -1.0;
                t_cur[1] = 2.0;
                for (k, &ck) in c.iter().enumerate() {
                    let tk = if k == 0 { &t_prev } else { &t_cur };
                    for j in 0..n {
                        out[j] += ck * tk[j];
                    }
                    if k >= 1 {
                        let mut next = vec![0.0; n + 1];
                        for j in 0..=n {
                            let shifted = if j > 0 { t_cur[j - 1] } else { 0.0 };
                            next[j] = 2.0 * (2.0 * shifted - t_cur[j]) - t_prev[j];
                        }
                        t_prev = std::mem::replace(&mut t_cur, next);
                    }
                }
                out
            }
        }
    }
}

/// Degree-n polynomial in z approximating ₂F₁(a, b; c; z) on [0, 1].
///
/// Exact when a or b lies in {0, −1, …, −n}; otherwise the Chebyshev
/// interpolant through n+1 first-kind points mapped to [0, 1], with the
/// maximum deviation measured on a fine grid.
pub fn truncate_2f1(a: f64, b: f64, c: f64, degree: usize) -> Result<HypergeomPoly> {
    if nonpositive_integer(c).is_some() {
        return Err(Error::Domain(format!("c = {c} is a nonpositive integer")));
    }
    if let Some(n) = polynomial_degree(a, b).filter(|&n| n <= degree) {
        let mut coeffs = vec![0.0; degree + 1];
        let mut term = 1.0;
        coeffs[0] = 1.0;
        for j in 0..n {
            let jf = j as f64;
            term *= (a + jf) * (b + jf) / ((c + jf) * (jf + 1.0));
            coeffs[j + 1] = term;
        }
        return Ok(HypergeomPoly {
            a,
            b,
            c,
            repr: HypergeomRepr::Monomial(coeffs),
            max_error: 0.0,
        });
    }
    if degree == 0 {
        let err = max_deviation(a, b, c, |_| 1.0)?;
        return Ok(HypergeomPoly {
            a,
            b,
            c,
            repr: HypergeomRepr::Monomial(vec![1.0]),
            max_error: err,
        });
    }
    let mut vals = Vec::with_capacity(degree + 1);
    for t in chebyshev::nodes(degree + 1) {
        vals.push(gauss_2f1(a, b, c, 0.5 * (t + 1.0))?);
    }
    let coeffs = chebyshev::coefficients(&vals);
    let err = max_deviation(a, b, c, |z| chebyshev::eval(&coeffs, 2.0 * z - 1.0))?;
    Ok(HypergeomPoly {
        a,
        b,
        c,
        repr: HypergeomRepr::Chebyshev01(coeffs),
        max_error: err,
    })
}

fn max_deviation<F: Fn(f64) -> f64>(a: f64, b: f64, c: f64, p: F) -> Result<f64> {
    const GRID: usize = 400;
    let mut err: f64 = 0.0;
    for i in 0..=GRID {
        // cosine spacing resolves the endpoint behaviour
        let z = 0.5 * (1.0 - (PI * i as f64 / GRID as f64).cos());
        let exact = match gauss_2f1(a, b, c, z) {
            Ok(v) => v,
            Err(_) if z == 1.0 => continue,
            Err(e) => return Err(e),
        };
        err = err.max((p(z) - exact).abs());
    }
    Ok(err)
}
