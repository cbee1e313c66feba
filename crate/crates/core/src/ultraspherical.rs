//! Ultraspherical (Gegenbauer) polynomials C_n^{(λ)} and coefficient-space operators.

use crate::chebyshev;
use crate::error::{invalid, Error, Result};
use crate::special::gamma;
use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

/// Ultraspherical parameter λ with λ > −1/2 and λ ≠ 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BasisParam {
    lambda: f64,
}

impl BasisParam {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= -0.5 || lambda == 0.0 {
            return Err(invalid(format!(
                "basis parameter lambda = {lambda} must satisfy lambda > -1/2, lambda != 0"
            )));
        }
        Ok(Self { lambda })
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Basis with parameter λ + 1, the target of differentiation.
    pub fn raised(&self) -> Self {
        Self {
            lambda: self.lambda + 1.0,
        }
    }

    /// ∫ (1−t²)^{λ−1/2} dt over (−1, 1).
    pub fn weight_integral(&self) -> f64 {
        let l = self.lambda;
        PI.sqrt() * gamma(l + 0.5) / gamma(l + 1.0)
    }

    /// Orthogonality constants h_m = ∫ w C_m² for m < count.
    pub fn norms(&self, count: usize) -> Vec<f64> {
        let l = self.lambda;
        let mut h = Vec::with_capacity(count);
        let mut cur = self.weight_integral();
        for m in 0..count {
            if m > 0 {
                let mf = m as f64;
                cur *= (mf - 1.0 + 2.0 * l) * (mf - 1.0 + l) / (mf * (mf + l));
            }
            h.push(cur);
        }
        h
    }

    /// The weight (1−t²)^{λ−1/2}.
    pub fn weight(&self, t: f64) -> f64 {
        ((1.0 - t) * (1.0 + t)).powf(self.lambda - 0.5)
    }
}

/// C_n^{(λ)}(x) by forward recurrence.
pub fn eval_poly(n: usize, basis: BasisParam, x: f64) -> f64 {
    let l = basis.lambda;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * l * x;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 * (kf + l) * x * cur - (kf + 2.0 * l - 1.0) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Values C_0(x), …, C_{n−1}(x).
pub fn eval_all(n: usize, basis: BasisParam, x: f64) -> Vec<f64> {
    let l = basis.lambda;
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    out.push(1.0);
    if n == 1 {
        return out;
    }
    out.push(2.0 * l * x);
    for k in 1..n - 1 {
        let kf = k as f64;
        out.push((2.0 * (kf + l) * x * out[k] - (kf + 2.0 * l - 1.0) * out[k - 1]) / (kf + 1.0));
    }
    out
}

/// Σ c_n C_n^{(λ)}(x), Clenshaw summation.
pub fn synthesis(basis: BasisParam, coeffs: &[f64], x: f64) -> f64 {
    let l = basis.lambda;
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for k in (0..coeffs.len()).rev() {
        let kf = k as f64;
        let a = 2.0 * (kf + l) / (kf + 1.0);
        let bnext = (kf + 2.0 * l) / (kf + 2.0);
        let b0 = coeffs[k] + a * x * b1 - bnext * b2;
        b2 = b1;
        b1 = b0;
    }
    b1
}

/// Coefficients of x·f given those of f; the result is one longer.
pub fn mul_x(basis: BasisParam, coeffs: &[f64]) -> Vec<f64> {
    let l = basis.lambda;
    let mut out = vec![0.0; coeffs.len() + 1];
    for (n, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let nf = n as f64;
        let d = 2.0 * (nf + l);
        if n > 0 {
            out[n - 1] += c * (nf + 2.0 * l - 1.0) / d;
        }
        out[n + 1] += c * (nf + 1.0) / d;
    }
    out
}

/// In-place variant writing x·f into `out`, truncated to `out.len()`.
pub(crate) fn mul_x_into(basis: BasisParam, coeffs: &[f64], out: &mut [f64]) {
    let l = basis.lambda;
    out.iter_mut().for_each(|v| *v = 0.0);
    for (n, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let nf = n as f64;
        let d = 2.0 * (nf + l);
        if n > 0 && n - 1 < out.len() {
            out[n - 1] += c * (nf + 2.0 * l - 1.0) / d;
        }
        if n + 1 < out.len() {
            out[n + 1] += c * (nf + 1.0) / d;
        }
    }
}

/// C^{(λ)} coefficients of Σ a_k T_k(x), computed exactly in coefficient space.
pub fn from_chebyshev(basis: BasisParam, cheb: &[f64]) -> Vec<f64> {
    let n = cheb.len();
    if n == 0 {
        return Vec::new();
    }
    let len = n + 1;
    let mut b1 = vec![0.0; len];
    let mut b2 = vec![0.0; len];
    let mut xb = vec![0.0; len];
    for k in (1..n).rev() {
        mul_x_into(basis, &b1, &mut xb);
        let mut b0 = vec![0.0; len];
        for j in 0..len {
            b0[j] = 2.0 * xb[j] - b2[j];
        }
        b0[0] += cheb[k];
        b2 = std::mem::replace(&mut b1, b0);
    }
    mul_x_into(basis, &b1, &mut xb);
    let mut out: Vec<f64> = (0..len).map(|j| xb[j] - b2[j]).collect();
    out[0] += cheb[0];
    out.truncate(n);
    out
}

/// C^{(λ)} coefficients of a polynomial given by monomial coefficients, by Horner.
pub fn from_monomial(basis: BasisParam, mono: &[f64]) -> Vec<f64> {
    let mut acc: Vec<f64> = Vec::new();
    for &m in mono.iter().rev() {
        acc = mul_x(basis, &acc);
        if acc.is_empty() {
            acc.push(0.0);
        }
        acc[0] += m;
    }
    acc.truncate(mono.len().max(1));
    acc
}

/// Interpolates f on [−1, 1] with `degree + 1` Chebyshev points and converts
/// to C^{(λ)} coefficients.
pub fn expand_function<F: FnMut(f64) -> f64>(basis: BasisParam, f: F, degree: usize) -> Vec<f64> {
    from_chebyshev(basis, &chebyshev::interpolate(f, degree + 1))
}

/// Structural class of an operator matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Structure {
    Diagonal,
    Banded {
        lower: usize,
        upper: usize,
    },
    /// Nonzeros confined to entries (i, j) with i + j < side.
    UpperLeftTriangle {
        side: usize,
    },
    ApproxBanded {
        bandwidth: usize,
        tail_bound: f64,
    },
    Dense,
}

/// A coefficient-space operator together with its declared structure.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub entries: DMatrix<f64>,
    pub structure: Structure,
}

impl OperatorMatrix {
    pub fn new(entries: DMatrix<f64>, structure: Structure) -> Self {
        Self { entries, structure }
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i < self.rows() && j < self.cols() {
            self.entries[(i, j)]
        } else {
            0.0
        }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len().min(self.cols());
        let mut out = vec![0.0; self.rows()];
        for (j, &vj) in v.iter().enumerate().take(n) {
            if vj == 0.0 {
                continue;
            }
            for (i, o) in out.iter_mut().enumerate() {
                *o += self.entries[(i, j)] * vj;
            }
        }
        out
    }

    /// Zeroes entries below `rel_tol · max(1, max|entry|)`.
    pub fn drop_small(&mut self, rel_tol: f64) {
        let scale = self.entries.amax().max(1.0);
        let cut = rel_tol * scale;
        self.entries
            .iter_mut()
            .filter(|v| v.abs() < cut)
            .for_each(|v| *v = 0.0);
    }

    /// Largest |i − j| among nonzeros below and above the diagonal.
    pub fn bandwidths(&self) -> (usize, usize) {
        let mut lower = 0;
        let mut upper = 0;
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                if self.entries[(i, j)] != 0.0 {
                    if i > j {
                        lower = lower.max(i - j);
                    } else {
                        upper = upper.max(j - i);
                    }
                }
            }
        }
        (lower, upper)
    }

    /// Largest entry outside the pattern implied by the structure tag.
    pub fn structure_violation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                let inside = match &self.structure {
                    Structure::Diagonal => i == j,
                    Structure::Banded { lower, upper } => i <= j + lower && j <= i + upper,
                    Structure::UpperLeftTriangle { side } => i + j < *side,
                    Structure::ApproxBanded { bandwidth, .. } => {
                        i <= j + bandwidth && j <= i + bandwidth
                    }
                    Structure::Dense => true,
                };
                if !inside {
                    worst = worst.max(self.entries[(i, j)].abs());
                }
            }
        }
        worst
    }

    /// Leading block with the given shape, zero padded when larger.
    pub fn resized(&self, rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |i, j| self.get(i, j))
    }

    /// Writes `row,col,value` triplets for nonzero entries.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(
            w,
            "# eqmeasure operator-triplets v1 rows={} cols={}",
            self.rows(),
            self.cols()
        )?;
        writeln!(w, "row,col,value")?;
        for j in 0..self.cols() {
            for i in 0..self.rows() {
                let v = self.entries[(i, j)];
                if v != 0.0 {
                    writeln!(w, "{i},{j},{v:e}")?;
                }
            }
        }
        Ok(())
    }
}

fn check_size(size: usize, min: usize) -> Result<()> {
    if size < min {
        return Err(Error::Dimension(format!(
            "size {size} is below the minimum {min}"
        )));
    }
    Ok(())
}

/// Tridiagonal multiplication-by-x operator, truncated to size × size.
pub fn multiplication_operator(basis: BasisParam, size: usize) -> Result<OperatorMatrix> {
    check_size(size, 2)?;
    let l = basis.lambda;
    let mut m = DMatrix::zeros(size, size);
    for n in 0..size {
        let nf = n as f64;
        let d = 2.0 * (nf + l);
        if n > 0 {
            m[(n - 1, n)] = (nf + 2.0 * l - 1.0) / d;
        }
        if n + 1 < size {
            m[(n + 1, n)] = (nf + 1.0) / d;
        }
    }
    Ok(OperatorMatrix::new(
        m,
        Structure::Banded { lower: 1, upper: 1 },
    ))
}

/// d/dx from C^{(λ)} to C^{(λ+1)} coefficients.
pub fn derivative_operator(basis: BasisParam, size: usize) -> Result<OperatorMatrix> {
    check_size(size, 1)?;
    let mut m = DMatrix::zeros(size, size);
    for n in 1..size {
        m[(n - 1, n)] = 2.0 * basis.lambda;
    }
    Ok(OperatorMatrix::new(
        m,
        Structure::Banded { lower: 0, upper: 1 },
    ))
}

/// Applies d/dx to a coefficient vector; result is in C^{(λ+1)}.
pub fn differentiate(basis: BasisParam, coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .skip(1)
        .map(|c| 2.0 * basis.lambda * c)
        .collect()
}

/// Conversion C^{(λ)} → C^{(λ+1)}.
pub fn conversion_operator(
    from: BasisParam,
    to: BasisParam,
    size: usize,
) -> Result<OperatorMatrix> {
    check_size(size, 1)?;
    if (to.lambda - from.lambda - 1.0).abs() > 1e-12 {
        return Err(invalid(
            "conversion only supports a unit step in lambda; compose unit steps",
        ));
    }
    let l = from.lambda;
    let mut m = DMatrix::zeros(size, size);
    for n in 0..size {
        let r = l / (n as f64 + l);
        m[(n, n)] = r;
        if n >= 2 {
            m[(n - 2, n)] = -r;
        }
    }
    Ok(OperatorMatrix::new(
        m,
        Structure::Banded { lower: 0, upper: 2 },
    ))
}

/// A real interval a < b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(invalid(format!("interval requires a < b, got ({a}, {b})")));
        }
        Ok(Self { a, b })
    }

    pub fn symmetric(r: f64) -> Result<Self> {
        Self::new(-r, r)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.b - self.a)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn to_local(&self, x: f64) -> f64 {
        (x - self.midpoint()) / self.half_width()
    }

    pub fn to_global(&self, t: f64) -> f64 {
        self.midpoint() + self.half_width() * t
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }
}

/// Either a single interval or a mirrored pair [−b, −a] ∪ [a, b].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SupportSpec {
    Interval { a: f64, b: f64 },
    SymmetricPair { a: f64, b: f64 },
}

impl SupportSpec {
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Interval::new(a, b)?;
        Ok(Self::Interval { a, b })
    }

    pub fn pair(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) {
            return Err(invalid(format!("symmetric pair requires a > 0, got {a}")));
        }
        Interval::new(a, b)?;
        Ok(Self::SymmetricPair { a, b })
    }

    /// The interval carrying the stored expansion (the right one for pairs).
    pub fn primary(&self) -> Interval {
        match *self {
            Self::Interval { a, b } | Self::SymmetricPair { a, b } => Interval { a, b },
        }
    }
}

/// u(x) = (1−t²)^{λ−1/2} Σ c_n C_n^{(λ)}(t), t the affine image of x in (−1, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedExpansion {
    pub basis: BasisParam,
    pub coeffs: Vec<f64>,
    pub support: Interval,
}

impl WeightedExpansion {
    pub fn new(basis: BasisParam, coeffs: Vec<f64>, support: Interval) -> Self {
        Self {
            basis,
            coeffs,
            support,
        }
    }

    /// The polynomial factor at local coordinate t.
    pub fn poly(&self, t: f64) -> f64 {
        synthesis(self.basis, &self.coeffs, t)
    }

    /// Value at global x; zero outside the support.
    pub fn eval(&self, x: f64) -> f64 {
        if !self.support.contains(x) {
            return 0.0;
        }
        let t = self.support.to_local(x).clamp(-1.0, 1.0);
        self.basis.weight(t) * self.poly(t)
    }

    pub fn integral(&self) -> f64 {
        definite_integral(self)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            basis: self.basis,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
            support: self.support,
        }
    }
}

/// ∫ u over its support; only the n = 0 coefficient contributes.
pub fn definite_integral(u: &WeightedExpansion) -> f64 {
    let c0 = u.coeffs.first().copied().unwrap_or(0.0);
    u.support.half_width() * c0 * u.basis.weight_integral()
}

/// Gauss–Gegenbauer quadrature for ∫ (1−t²)^{λ−1/2} f(t) dt.
#[derive(Debug, Clone)]
pub struct GaussGegenbauer {
    pub basis: BasisParam,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussGegenbauer {
    /// Golub–Welsch construction with n nodes.
    pub fn new(basis: BasisParam, n: usize) -> Result<Self> {
        check_size(n, 1)?;
        let l = basis.lambda;
        let mut jac = DMatrix::zeros(n, n);
        for k in 1..n {
            let kf = k as f64;
            let off = (kf * (kf + 2.0 * l - 1.0) / (4.0 * (kf + l) * (kf + l - 1.0))).sqrt();
            jac[(k, k - 1)] = off;
            jac[(k - 1, k)] = off;
        }
        let eig = SymmetricEigen::new(jac);
        let mu0 = basis.weight_integral();
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| (eig.eigenvalues[i], mu0 * eig.eigenvectors[(0, i)].powi(2)))
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        Ok(Self {
            basis,
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Orthogonal projection of sampled values onto C_0 … C_{count−1}.
    pub fn project_values(&self, values: &[f64], count: usize) -> Vec<f64> {
        let h = self.basis.norms(count);
        let mut out = vec![0.0; count];
        for ((&x, &w), &v) in self.nodes.iter().zip(&self.weights).zip(values) {
            let c = eval_all(count, self.basis, x);
            for m in 0..count {
                out[m] += w * v * c[m];
            }
        }
        out.iter_mut().zip(&h).for_each(|(o, hm)| *o /= hm);
        out
    }

    pub fn project<F: FnMut(f64) -> f64>(&self, f: F, count: usize) -> Vec<f64> {
        let vals: Vec<f64> = self.nodes.iter().copied().map(f).collect();
        self.project_values(&vals, count)
    }
}
