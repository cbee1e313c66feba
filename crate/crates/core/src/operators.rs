//! Matrices of the power-law integral operator
//! Q^α[u](x) = ∫ |x − y|^α u(y) dy on weighted ultraspherical coefficients.

use crate::chebyshev;
use crate::error::{invalid, Error, Result};
use crate::special::{gamma, gauss_2f1, ln_gamma, truncate_2f1, HypergeomRepr};
use crate::ultraspherical::{
    from_chebyshev, from_monomial, mul_x, mul_x_into, BasisParam, OperatorMatrix, Structure,
};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const DROP_TOL: f64 = 1e-14;
const INTEGER_TOL: f64 = 1e-12;

/// A kernel exponent α > −1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelPower(f64);

impl KernelPower {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= -1.0 {
            return Err(invalid(format!("kernel power {alpha} must exceed -1")));
        }
        Ok(Self(alpha))
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn is_even_integer(&self) -> bool {
        is_even_integer(self.0)
    }

    pub fn is_integer(&self) -> bool {
        (self.0 - self.0.round()).abs() < INTEGER_TOL
    }
}

pub(crate) fn is_even_integer(x: f64) -> bool {
    let h = 0.5 * x;
    (h - h.round()).abs() < INTEGER_TOL
}

fn nonnegative_integer(x: f64) -> Option<usize> {
    let r = x.round();
    if r >= 0.0 && (x - r).abs() < INTEGER_TOL {
        Some(r as usize)
    } else {
        None
    }
}

/// λ making Q^α banded: λ + α/2 ∈ ℕ₀ with λ > −1/2, or α/2 for even α.
pub fn select_lambda(alpha: KernelPower) -> Result<BasisParam> {
    let a = alpha.value();
    if alpha.is_even_integer() {
        return BasisParam::new((0.5 * a).round());
    }
    let h = 0.5 * a;
    let lower = h.floor() - h;
    let lam = if lower > -0.5 { lower } else { h.ceil() - h };
    BasisParam::new(lam)
}

/// How the common ultraspherical parameter is chosen for a problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "mode", content = "lambda", rename_all = "kebab-case")]
pub enum LambdaPolicy {
    /// Banded for α, or for β when β is not an even integer and either α is
    /// one or β < 0. Negative powers have seeds that blow up at ±1 unless the
    /// basis makes them polynomial.
    #[default]
    Auto,
    FromAlpha,
    FromBeta,
    Explicit(f64),
}

impl LambdaPolicy {
    pub fn resolve(&self, alpha: KernelPower, beta: Option<KernelPower>) -> Result<BasisParam> {
        match *self {
            LambdaPolicy::Auto => match beta {
                Some(b) if !b.is_even_integer() && (alpha.is_even_integer() || b.value() < 0.0) => {
                    select_lambda(b)
                }
                _ => select_lambda(alpha),
            },
            LambdaPolicy::FromAlpha => select_lambda(alpha),
            LambdaPolicy::FromBeta => select_lambda(
                beta.ok_or_else(|| invalid("lambda policy from-beta needs a repulsive power"))?,
            ),
            LambdaPolicy::Explicit(l) => BasisParam::new(l),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Exactness {
    ExactPolynomial,
    Approximated { max_error: f64 },
}

impl Exactness {
    pub fn error(&self) -> f64 {
        match *self {
            Exactness::ExactPolynomial => 0.0,
            Exactness::Approximated { max_error } => max_error,
        }
    }
}

/// C^{(λ)} expansions of Q^α[w C_0] and Q^α[w C_1].
#[derive(Debug, Clone, PartialEq)]
pub struct SeedRows {
    pub n0: Vec<f64>,
    pub n1: Vec<f64>,
    pub exactness: Exactness,
}

impl SeedRows {
    /// Polynomial degree of the wider seed.
    pub fn degree(&self) -> usize {
        self.n0.len().max(self.n1.len()).saturating_sub(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedOptions {
    /// Target max error of the seed functions on [−1, 1].
    pub tol: f64,
    /// Upper bound on the polynomial degree in x of approximated seeds.
    pub max_degree: usize,
}

impl Default for SeedOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_degree: 1024,
        }
    }
}

fn seed_prefactor(alpha: f64, lambda: f64) -> f64 {
    gamma(0.5 * (alpha + 1.0)) * gamma(lambda + 0.5) / gamma(lambda + 0.5 * alpha + 1.0)
}

/// Degree in z = x² of the terminating hypergeometric factor, if any.
fn exact_z_degree(alpha: f64, lambda: f64) -> Option<usize> {
    let by_alpha = if is_even_integer(alpha) && alpha >= 0.0 {
        nonnegative_integer(0.5 * alpha)
    } else {
        None
    };
    let by_lambda = nonnegative_integer(lambda + 0.5 * alpha);
    match (by_alpha, by_lambda) {
        (Some(p), Some(q)) => Some(p.min(q)),
        (p, q) => p.or(q),
    }
}

/// Closed-form seeds. With a = −α/2, b = −λ − α/2 and
/// G = Γ((α+1)/2)Γ(λ+1/2)/Γ(λ+α/2+1):
///   Q^α[w C_0](x) = G ₂F₁(a, b; 1/2; x²)
///   Q^α[w C_1](x) = 2λG x [₂F₁(a, b; 1/2; x²) − (α+1) ₂F₁(a, b; 3/2; x²)]
/// The second identity follows from differentiating the first kernel in x.
pub fn seed_rows(alpha: KernelPower, basis: BasisParam, opts: SeedOptions) -> Result<SeedRows> {
    let al = alpha.value();
    let l = basis.lambda();
    let g = seed_prefactor(al, l);
    if !g.is_finite() {
        return Err(Error::Domain(format!(
            "gamma pole in seed prefactor for alpha={al}, lambda={l}"
        )));
    }
    let (a, b) = (-0.5 * al, -l - 0.5 * al);
    if let Some(dz) = exact_z_degree(al, l) {
        let f = truncate_2f1(a, b, 0.5, dz)?.coeffs_in_z();
        let h = truncate_2f1(a, b, 1.5, dz)?.coeffs_in_z();
        let mut m0 = vec![0.0; 2 * dz + 1];
        let mut m1 = vec![0.0; 2 * dz + 2];
        for j in 0..=dz {
            m0[2 * j] = g * f[j];
            m1[2 * j + 1] = 2.0 * l * g * (f[j] - (al + 1.0) * h[j]);
        }
        return Ok(SeedRows {
            n0: from_monomial(basis, &m0),
            n1: from_monomial(basis, &m1),
            exactness: Exactness::ExactPolynomial,
        });
    }
    let max_dz = (opts.max_degree.saturating_sub(1) / 2).max(1);
    let mut dz = 4.min(max_dz);
    loop {
        let p = truncate_2f1(a, b, 0.5, dz)?;
        let q = truncate_2f1(a, b, 1.5, dz)?;
        let err = g.abs()
            * p.max_error
                .max(2.0 * l.abs() * (p.max_error + (al + 1.0).abs() * q.max_error));
        if err <= opts.tol || dz >= max_dz {
            let (HypergeomRepr::Chebyshev01(pc), HypergeomRepr::Chebyshev01(qc)) =
                (&p.repr, &q.repr)
            else {
                return Err(Error::Consistency(
                    "expected Chebyshev seed representation".into(),
                ));
            };
            // T_k(2z − 1) = T_{2k}(x) for z = x²
            let mut t0 = vec![0.0; 2 * dz + 1];
            let mut t1 = vec![0.0; 2 * dz + 1];
            for k in 0..=dz {
                t0[2 * k] = g * pc[k];
                t1[2 * k] = 2.0 * l * g * (pc[k] - (al + 1.0) * qc[k]);
            }
            let n0 = from_chebyshev(basis, &t0);
            let n1 = mul_x(basis, &from_chebyshev(basis, &t1));
            return Ok(SeedRows {
                n0,
                n1,
                exactness: Exactness::Approximated { max_error: err },
            });
        }
        dz = (2 * dz).min(max_dz);
    }
}

pub fn seed_n0(alpha: KernelPower, basis: BasisParam) -> Result<Vec<f64>> {
    Ok(seed_rows(alpha, basis, SeedOptions::default())?.n0)
}

pub fn seed_n1(alpha: KernelPower, basis: BasisParam) -> Result<Vec<f64>> {
    Ok(seed_rows(alpha, basis, SeedOptions::default())?.n1)
}

/// Coefficients κ₁(n), κ₂(n) of the column recurrence
/// x Q[w C_n] = κ₁ Q[w C_{n−1}] + κ₂ Q[w C_{n+1}].
pub fn recurrence_coefficients(alpha: f64, lambda: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let k1 = (nf - alpha - 1.0) * (2.0 * lambda + nf - 1.0) / (2.0 * nf * (lambda + nf));
    let k2 = (nf + 1.0) * (2.0 * lambda + nf + alpha + 1.0)
        / (2.0 * (lambda + nf) * (2.0 * lambda + nf));
    (k1, k2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorOptions {
    pub seed_tol: f64,
    /// Polynomial degree allowed for approximated seeds; defaults to size/2.
    pub bandwidth: Option<usize>,
    /// Ignore the bandwidth cap and resolve the seeds to `seed_tol`.
    pub dense: bool,
    /// Fail when the seeds miss `seed_tol`.
    pub require_tol: bool,
    pub drop_tol: f64,
}

impl Default for OperatorOptions {
    fn default() -> Self {
        Self {
            seed_tol: 1e-10,
            bandwidth: None,
            dense: false,
            require_tol: false,
            drop_tol: DROP_TOL,
        }
    }
}

/// Q^α in a C^{(λ)} basis with its seed diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawOperator {
    pub alpha: KernelPower,
    pub basis: BasisParam,
    pub matrix: OperatorMatrix,
    pub seeds: Exactness,
    pub seed_degree: usize,
}

impl PowerLawOperator {
    pub fn build(
        alpha: KernelPower,
        basis: BasisParam,
        size: usize,
        opts: &OperatorOptions,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::Dimension("operator size must be positive".into()));
        }
        let max_degree = if opts.dense {
            4096
        } else {
            opts.bandwidth.unwrap_or((size / 2).max(8))
        };
        let seeds = seed_rows(
            alpha,
            basis,
            SeedOptions {
                tol: opts.seed_tol,
                max_degree,
            },
        )?;
        if opts.require_tol && seeds.exactness.error() > opts.seed_tol {
            return Err(Error::SeedTolerance {
                achieved: seeds.exactness.error(),
                requested: opts.seed_tol,
            });
        }
        let degree = seeds.degree();
        let rows = size + degree + 1;
        let entries = run_recurrence(alpha.value(), basis, size, rows, &seeds)?;
        let mut matrix = OperatorMatrix::new(entries, Structure::Dense);
        matrix.drop_small(opts.drop_tol);
        matrix.structure = classify(&matrix, alpha, basis, &seeds);
        Ok(Self {
            alpha,
            basis,
            matrix,
            seeds: seeds.exactness,
            seed_degree: degree,
        })
    }
}

fn run_recurrence(
    alpha: f64,
    basis: BasisParam,
    size: usize,
    rows: usize,
    seeds: &SeedRows,
) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(rows, size);
    let col = |v: &[f64]| {
        let mut c = vec![0.0; rows];
        c[..v.len().min(rows)].copy_from_slice(&v[..v.len().min(rows)]);
        c
    };
    let mut prev = col(&seeds.n0);
    m.column_mut(0).copy_from_slice(&prev);
    if size == 1 {
        return Ok(m);
    }
    let mut cur = col(&seeds.n1);
    m.column_mut(1).copy_from_slice(&cur);
    let mut xc = vec![0.0; rows];
    for n in 1..size - 1 {
        let (k1, k2) = recurrence_coefficients(alpha, basis.lambda(), n);
        if k2 == 0.0 || !k2.is_finite() {
            return Err(Error::Consistency(format!(
                "vanishing recurrence coefficient at n = {n}"
            )));
        }
        mul_x_into(basis, &cur, &mut xc);
        let next: Vec<f64> = (0..rows).map(|i| (xc[i] - k1 * prev[i]) / k2).collect();
        m.column_mut(n + 1).copy_from_slice(&next);
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(m)
}

fn classify(
    m: &OperatorMatrix,
    alpha: KernelPower,
    basis: BasisParam,
    seeds: &SeedRows,
) -> Structure {
    let a = alpha.value();
    let l = basis.lambda();
    if a > -1.0 && a < 1.0 && a != 0.0 && (l + 0.5 * a).abs() < INTEGER_TOL {
        return Structure::Diagonal;
    }
    if alpha.is_even_integer() && a >= 0.0 {
        return Structure::UpperLeftTriangle {
            side: a.round() as usize + 1,
        };
    }
    if nonnegative_integer(l + 0.5 * a).is_some() {
        let (lower, upper) = m.bandwidths();
        return Structure::Banded { lower, upper };
    }
    let bandwidth = seeds.degree();
    let mut probe = m.clone();
    probe.structure = Structure::ApproxBanded {
        bandwidth,
        tail_bound: 0.0,
    };
    Structure::ApproxBanded {
        bandwidth,
        tail_bound: probe.structure_violation(),
    }
}

/// Q^α as an OperatorMatrix with default options and an optional seed bandwidth.
pub fn build_operator(
    alpha: KernelPower,
    basis: BasisParam,
    size: usize,
    bandwidth: Option<usize>,
) -> Result<OperatorMatrix> {
    let opts = OperatorOptions {
        bandwidth,
        ..OperatorOptions::default()
    };
    Ok(PowerLawOperator::build(alpha, basis, size, &opts)?.matrix)
}

/// Diagonal entry of Q^α in the basis λ = −α/2, α ∈ (−1, 1) \ {0}.
///
/// Evaluated as −2 sin(πα/2) Γ(α+1) Γ(n−α)/Γ(n+1) for n ≥ 1, which equals
/// (−1)^n π / (n B(α+1−n, n) cos(πα/2)) without passing through gamma poles.
pub fn popov_diagonal(alpha: KernelPower, n: usize) -> Result<f64> {
    let a = alpha.value();
    if !(a > -1.0 && a < 1.0) || a == 0.0 {
        return Err(invalid(format!(
            "Popov diagonal requires alpha in (-1, 1) without 0, got {a}"
        )));
    }
    if n == 0 {
        return Ok(PI / (0.5 * PI * a).cos());
    }
    let nf = n as f64;
    let (lg_num, _) = ln_gamma(nf - a);
    let (lg_den, _) = ln_gamma(nf + 1.0);
    Ok(-2.0 * (0.5 * PI * a).sin() * gamma(a + 1.0) * (lg_num - lg_den).exp())
}

/// Closed forms of Q^α[w C_0] and Q^α[w C_1] at |x| > 1.
pub fn far_field_values(alpha: f64, lambda: f64, x: f64) -> Result<(f64, f64)> {
    if x.abs() <= 1.0 {
        return Err(Error::Domain(format!(
            "far-field evaluation needs |x| > 1, got {x}"
        )));
    }
    let ax = x.abs();
    let z = 1.0 / (x * x);
    let base = PI.sqrt() * gamma(lambda + 0.5);
    let f0 = gauss_2f1(0.5 * (1.0 - alpha), -0.5 * alpha, 1.0 + lambda, z)?;
    let g0 = base * ax.powf(alpha) * f0 / gamma(1.0 + lambda);
    let f1 = gauss_2f1(0.5 * (1.0 - alpha), 1.0 - 0.5 * alpha, 2.0 + lambda, z)?;
    let g1 = -x.signum() * base * alpha * lambda * ax.powf(alpha - 1.0) * f1 / gamma(2.0 + lambda);
    Ok((g0, g1))
}

/// Chebyshev-resolved polynomial approximations in s ∈ [−1, 1] of the far-field
/// seeds evaluated at x = −shift − s.
pub fn far_field_seeds(
    alpha: KernelPower,
    basis: BasisParam,
    shift: f64,
    tol: f64,
) -> Result<SeedRows> {
    if shift - 1.0 <= 1.0 {
        return Err(Error::Domain(format!(
            "far-field shift {shift} must exceed 2"
        )));
    }
    let (al, l) = (alpha.value(), basis.lambda());
    let mut n = 16;
    loop {
        let mut v0 = Vec::with_capacity(n);
        let mut v1 = Vec::with_capacity(n);
        for s in chebyshev::nodes(n) {
            let (g0, g1) = far_field_values(al, l, -shift - s)?;
            v0.push(g0);
            v1.push(g1);
        }
        let c0 = chebyshev::coefficients(&v0);
        let c1 = chebyshev::coefficients(&v1);
        let scale = c0
            .iter()
            .chain(&c1)
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(f64::MIN_POSITIVE);
        let tail = c0[n - 4..]
            .iter()
            .chain(&c1[n - 4..])
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if tail <= tol * scale || n >= 4096 {
            let exactness = if alpha.is_integer() && al >= 0.0 && tail <= 1e-14 * scale {
                Exactness::ExactPolynomial
            } else {
                Exactness::Approximated { max_error: tail }
            };
            let trim = |c: &[f64]| {
                let last = c.iter().rposition(|v| v.abs() > 1e-17 * scale).unwrap_or(0);
                from_chebyshev(basis, &c[..=last])
            };
            return Ok(SeedRows {
                n0: trim(&c0),
                n1: trim(&c1),
                exactness,
            });
        }
        n *= 2;
    }
}

/// Matrix of s ↦ Q^α[w C_n](−shift − s), the kernel seen from the mirrored interval.
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldOperator {
    pub matrix: OperatorMatrix,
    /// Largest discarded Chebyshev coefficient, relative to the largest kept one.
    pub tail: f64,
    /// Relative mismatch between the recurrence and the closed form for n = 1.
    pub consistency: f64,
}

impl FarFieldOperator {
    /// Operator for the pair [−b, −a] ∪ [a, b] with the output truncated to `rows`.
    pub fn build(
        alpha: KernelPower,
        basis: BasisParam,
        size: usize,
        rows: usize,
        a: f64,
        b: f64,
    ) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::Domain(format!(
                "two-interval geometry needs a > 0, got a = {a}"
            )));
        }
        if a >= b {
            return Err(invalid(format!(
                "two-interval geometry needs a < b, got ({a}, {b})"
            )));
        }
        if size == 0 || rows == 0 {
            return Err(Error::Dimension(
                "far-field operator needs positive size".into(),
            ));
        }
        let shift = 2.0 * (b + a) / (b - a);
        Self::build_shifted(alpha, basis, size, rows, shift)
    }

    pub fn build_shifted(
        alpha: KernelPower,
        basis: BasisParam,
        size: usize,
        rows: usize,
        shift: f64,
    ) -> Result<Self> {
        let (al, l) = (alpha.value(), basis.lambda());
        let rho = {
            let d = shift - 1.0;
            d + (d * d - 1.0).sqrt()
        };
        let ln_rho = rho.ln();
        let extra = (40.0 / ln_rho).ceil() as usize;
        let nodes_n = (rows + 8 + extra).min(rows + 4096);
        let finite_rank = if alpha.is_integer() && al > 0.0 {
            Some(al.round() as usize)
        } else {
            None
        };
        let nodes = chebyshev::nodes(nodes_n);
        let mut values = DMatrix::zeros(nodes_n, size);
        let mut consistency: f64 = 0.0;
        let miller_top = size + 16 + extra;
        for (j, &s) in nodes.iter().enumerate() {
            let x = -shift - s;
            let (g0, g1) = far_field_values(al, l, x)?;
            match finite_rank {
                Some(p) => {
                    let (mut prev, mut cur) = (g0, g1);
                    values[(j, 0)] = g0;
                    if size > 1 {
                        values[(j, 1)] = g1;
                    }
                    for n in 1..size.saturating_sub(1) {
                        if n + 1 > p {
                            break;
                        }
                        let (k1, k2) = recurrence_coefficients(al, l, n);
                        let next = (x * cur - k1 * prev) / k2;
                        values[(j, n + 1)] = next;
                        prev = cur;
                        cur = next;
                    }
                }
                None => {
                    // Miller: the far-field sequence is the minimal solution.
                    let mut seq = vec![0.0; miller_top + 2];
                    seq[miller_top] = 1.0;
                    for n in (1..=miller_top).rev() {
                        let (k1, k2) = recurrence_coefficients(al, l, n);
                        seq[n - 1] = (x * seq[n] - k2 * seq[n + 1]) / k1;
                        if seq[n - 1].abs() > 1e200 {
                            let s = 1e-200;
                            seq[n - 1..].iter_mut().for_each(|v| *v *= s);
                        }
                    }
                    let scale = g0 / seq[0];
                    for n in 0..size {
                        values[(j, n)] = seq[n] * scale;
                    }
                    let mismatch = (seq[1] * scale - g1).abs()
                        / g1.abs().max(g0.abs() * 1e-3).max(f64::MIN_POSITIVE);
                    consistency = consistency.max(mismatch);
                }
            }
        }
        let cheb = chebyshev_matrix(nodes_n) * &values;
        let mut entries = DMatrix::zeros(rows, size);
        let mut tail: f64 = 0.0;
        for n in 0..size {
            let column: Vec<f64> = cheb.column(n).iter().copied().collect();
            let conv = from_chebyshev(basis, &column);
            let kept = conv[..rows.min(conv.len())]
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()));
            let dropped = conv[rows.min(conv.len())..]
                .iter()
                .fold(0.0f64, |m, v| m.max(v.abs()));
            if kept > 0.0 {
                tail = tail.max(dropped / kept);
            }
            for (i, v) in conv.iter().take(rows).enumerate() {
                entries[(i, n)] = *v;
            }
        }
        if consistency > 1e-8 {
            return Err(Error::Consistency(format!(
                "far-field recurrence disagrees with the closed form (relative {consistency:.2e})"
            )));
        }
        let mut matrix = OperatorMatrix::new(entries, Structure::Dense);
        matrix.drop_small(DROP_TOL);
        if let Some(p) = finite_rank.filter(|&p| p < size) {
            if alpha.is_even_integer() {
                matrix.structure = Structure::UpperLeftTriangle { side: p + 1 };
            }
        }
        Ok(Self {
            matrix,
            tail,
            consistency,
        })
    }
}

fn chebyshev_matrix(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |k, j| {
        let v = 2.0 / n as f64 * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos();
        if k == 0 {
            0.5 * v
        } else {
            v
        }
    })
}

/// Far-field operator for the pair (a, b), `size` rows and columns.
pub fn build_far_operator(
    alpha: KernelPower,
    basis: BasisParam,
    size: usize,
    a: f64,
    b: f64,
) -> Result<OperatorMatrix> {
    Ok(FarFieldOperator::build(alpha, basis, size, size, a, b)?.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::beta_fn;

    fn kp(a: f64) -> KernelPower {
        KernelPower::new(a).unwrap()
    }

    #[test]
    fn lambda_selection() {
        assert!((select_lambda(kp(0.5)).unwrap().lambda() + 0.25).abs() < 1e-15);
        assert!((select_lambda(kp(3.9)).unwrap().lambda() - 0.05).abs() < 1e-12);
        assert_eq!(select_lambda(kp(2.0)).unwrap().lambda(), 1.0);
        assert!(KernelPower::new(-1.0).is_err());
        let l = LambdaPolicy::Auto.resolve(kp(2.0), Some(kp(1.5))).unwrap();
        assert!((l.lambda() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn popov_matches_beta_form() {
        let a = 0.5;
        for n in 1..12 {
            let nf = n as f64;
            let b = beta_fn(-nf + a + 1.0, nf).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let want = sign * PI / (nf * b * (0.5 * PI * a).cos());
            let got = popov_diagonal(kp(a), n).unwrap();
            assert!((got - want).abs() < 1e-12 * want.abs(), "{n}: {got} {want}");
        }
        assert!((popov_diagonal(kp(0.5), 1).unwrap() + PI / 2f64.sqrt()).abs() < 1e-14);
        assert!((popov_diagonal(kp(0.5), 0).unwrap() - PI * 2f64.sqrt()).abs() < 1e-13);
        assert!(popov_diagonal(kp(1.5), 3).is_err());
    }

    #[test]
    fn flat_quadratic_seed() {
        // ∫ (x−y)² dy = 2x² + 2/3 over (−1, 1)
        let b = BasisParam::new(0.5).unwrap();
        let n0 = seed_n0(kp(2.0), b).unwrap();
        let p = |x: f64| crate::ultraspherical::synthesis(b, &n0, x);
        assert!((p(0.0) - 2.0 / 3.0).abs() < 1e-14);
        assert!((p(0.7) - (2.0 * 0.49 + 2.0 / 3.0)).abs() < 1e-14);
        assert_eq!(n0.len(), 3);
    }

    #[test]
    fn triangle_for_quadratic_kernel() {
        let op = build_operator(kp(2.0), BasisParam::new(1.0).unwrap(), 12, None).unwrap();
        assert_eq!(op.structure, Structure::UpperLeftTriangle { side: 3 });
        assert_eq!(op.structure_violation(), 0.0);
    }
}
