//! Assembly and solution of the first-kind systems for equilibrium measures.

use crate::chebyshev;
use crate::error::{invalid, Error, Result};
use crate::operators::{
    FarFieldOperator, KernelPower, LambdaPolicy, OperatorOptions, PowerLawOperator,
};
use crate::ultraspherical::{
    differentiate, from_chebyshev, synthesis, BasisParam, Interval, OperatorMatrix, Structure,
    SupportSpec, WeightedExpansion,
};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

pub const DEFAULT_TIKHONOV: f64 = 1e-13;
pub const POSITIVITY_TOL: f64 = 1e-10;
pub const DENSITY_GRID: usize = 1001;
const RESIDUAL_POINTS: usize = 20;
/// Local coordinate of the energy evaluation point: midpoint + 0.1·(b − a).
pub const ENERGY_POINT: f64 = 0.2;

/// A smooth external potential V(x).
#[derive(Clone)]
pub struct ExternalPotential {
    pub name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl ExternalPotential {
    pub fn new<F: Fn(f64) -> f64 + Send + Sync + 'static>(name: impl Into<String>, f: F) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

impl fmt::Debug for ExternalPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExternalPotential")
            .field("name", &self.name)
            .finish()
    }
}

/// Problem definition shared by all solvers.
///
/// Without a potential the kernel is |r|^α/α − |r|^β/β. With a potential V the
/// kernel is −|r|^α/α, repulsive for α ∈ (−1, 1) \ {0}, and V confines.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub alpha: KernelPower,
    pub beta: Option<KernelPower>,
    pub potential: Option<ExternalPotential>,
    pub mass: f64,
    pub size: usize,
    pub tikhonov: f64,
    pub lambda_policy: LambdaPolicy,
    pub operator: OperatorOptions,
}

impl ProblemSpec {
    pub fn attractive_repulsive(alpha: f64, beta: f64, mass: f64) -> Result<Self> {
        let spec = Self {
            alpha: KernelPower::new(alpha)?,
            beta: Some(KernelPower::new(beta)?),
            potential: None,
            mass,
            size: 100,
            tikhonov: DEFAULT_TIKHONOV,
            lambda_policy: LambdaPolicy::Auto,
            operator: OperatorOptions::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_potential(alpha: f64, potential: ExternalPotential, mass: f64) -> Result<Self> {
        let spec = Self {
            alpha: KernelPower::new(alpha)?,
            beta: None,
            potential: Some(potential),
            mass,
            size: 40,
            tikhonov: DEFAULT_TIKHONOV,
            lambda_policy: LambdaPolicy::Auto,
            operator: OperatorOptions::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn size(mut self, n: usize) -> Self {
        self.size = n;
        self
    }

    pub fn tikhonov(mut self, s: f64) -> Self {
        self.tikhonov = s;
        self
    }

    pub fn lambda_policy(mut self, p: LambdaPolicy) -> Self {
        self.lambda_policy = p;
        self
    }

    pub fn operator_options(mut self, o: OperatorOptions) -> Self {
        self.operator = o;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(invalid(format!("mass must be positive, got {}", self.mass)));
        }
        if self.size < 2 {
            return Err(Error::Dimension(format!(
                "truncation size {} is below 2",
                self.size
            )));
        }
        if !(self.tikhonov >= 0.0) {
            return Err(invalid("Tikhonov parameter must be nonnegative"));
        }
        if self.alpha.value() == 0.0 {
            return Err(invalid("alpha = 0 (logarithmic kernel) is not supported"));
        }
        if let Some(b) = self.beta {
            if self.potential.is_some() {
                return Err(invalid(
                    "give either a repulsive power or an external potential, not both",
                ));
            }
            if b.value() == 0.0 {
                return Err(invalid("beta = 0 (logarithmic kernel) is not supported"));
            }
            if self.alpha.value() <= b.value() {
                return Err(invalid(format!(
                    "attractive power must exceed repulsive power (alpha = {}, beta = {})",
                    self.alpha.value(),
                    b.value()
                )));
            }
        }
        Ok(())
    }

    pub fn basis(&self) -> Result<BasisParam> {
        self.lambda_policy.resolve(self.alpha, self.beta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "s", rename_all = "kebab-case")]
pub enum SolveMethod {
    Direct,
    Tikhonov(f64),
}

impl SolveMethod {
    pub fn from_parameter(s: f64) -> Self {
        if s > 0.0 {
            SolveMethod::Tikhonov(s)
        } else {
            SolveMethod::Direct
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// max |K*ρ (+V) − E| over interior points.
    pub residual: f64,
    pub method: SolveMethod,
    pub lambda: f64,
    pub size: usize,
    pub seed_error: f64,
    /// E from the mass condition, before evaluation of the field.
    pub energy_from_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSolution {
    /// Expansion on the single interval, or on the right interval of a pair.
    pub measure: WeightedExpansion,
    pub support: SupportSpec,
    /// Euler–Lagrange constant: K*ρ (+V) on the support.
    pub energy: f64,
    /// Total energy ½∫(K*ρ)ρ (+∫Vρ), the objective of the support search.
    pub interaction: f64,
    pub mass: f64,
    pub mass_check: f64,
    pub min_density: f64,
    /// Coefficients of the interaction field K*ρ on the primary interval.
    pub field: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl EquilibriumSolution {
    /// Density at x, including the mirrored half of a pair.
    pub fn density(&self, x: f64) -> f64 {
        match self.support {
            SupportSpec::Interval { .. } => self.measure.eval(x),
            SupportSpec::SymmetricPair { .. } => self.measure.eval(x.abs()),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.min_density >= -POSITIVITY_TOL
    }

    /// Interaction field at x inside the primary interval.
    pub fn field_at(&self, x: f64) -> f64 {
        synthesis(
            self.measure.basis,
            &self.field,
            self.measure.support.to_local(x),
        )
    }

    /// Outer hull [lo, hi] of the support.
    pub fn hull(&self) -> (f64, f64) {
        match self.support {
            SupportSpec::Interval { a, b } => (a, b),
            SupportSpec::SymmetricPair { b, .. } => (-b, b),
        }
    }
}

/// Solves the square leading n×n block by LU.
pub fn solve_direct(f: &DMatrix<f64>, rhs: &[f64], size: usize) -> Result<Vec<f64>> {
    let n = size.min(f.ncols()).min(f.nrows());
    let a = f.view((0, 0), (n, n)).into_owned();
    let b = DVector::from_iterator(n, (0..n).map(|i| rhs.get(i).copied().unwrap_or(0.0)));
    let lu = a.lu();
    let x = lu
        .solve(&b)
        .ok_or_else(|| Error::IllPosed("truncated operator is singular".into()))?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::IllPosed("direct solution is not finite".into()));
    }
    Ok(x.iter().copied().collect())
}

/// Minimizes ‖Fc − rhs‖² + s‖c‖² over the leading n×n block.
///
/// Equivalent to (sI + FᵀF)c = Fᵀrhs but solved as the stacked least-squares
/// problem [F; √s I] c = [rhs; 0] by QR, which keeps the conditioning at κ(F)
/// instead of κ(F)².
pub fn solve_tikhonov(f: &DMatrix<f64>, rhs: &[f64], s: f64) -> Result<Vec<f64>> {
    let n = f.ncols().min(f.nrows());
    let mut stacked = DMatrix::zeros(2 * n, n);
    stacked
        .view_mut((0, 0), (n, n))
        .copy_from(&f.view((0, 0), (n, n)));
    let rs = s.max(0.0).sqrt();
    for i in 0..n {
        stacked[(n + i, i)] = rs;
    }
    let mut b = DVector::zeros(2 * n);
    for i in 0..n {
        b[i] = rhs.get(i).copied().unwrap_or(0.0);
    }
    let qr = stacked.qr();
    let qtb = qr.q().transpose() * b;
    let r = qr.r();
    let x = r
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::IllPosed("regularized system is singular".into()))?;
    Ok(x.iter().copied().collect())
}

fn solve_method(
    f: &DMatrix<f64>,
    rhs: &[f64],
    size: usize,
    method: SolveMethod,
) -> Result<Vec<f64>> {
    match method {
        SolveMethod::Direct => solve_direct(f, rhs, size),
        SolveMethod::Tikhonov(s) => {
            let sq = f.view((0, 0), (size, size)).into_owned();
            solve_tikhonov(&sq, rhs, s)
        }
    }
}

fn min_on_grid(basis: BasisParam, coeffs: &[f64]) -> f64 {
    (0..DENSITY_GRID)
        .map(|i| {
            synthesis(
                basis,
                coeffs,
                -1.0 + 2.0 * i as f64 / (DENSITY_GRID - 1) as f64,
            )
        })
        .fold(f64::INFINITY, f64::min)
}

/// ∫ f(t) g(t) w(t) dt for a plain expansion f and weighted expansion g.
fn weighted_dot(basis: BasisParam, f: &[f64], g: &[f64]) -> f64 {
    let n = f.len().min(g.len());
    let h = basis.norms(n);
    (0..n).map(|k| f[k] * g[k] * h[k]).sum()
}

fn residual_points() -> impl Iterator<Item = f64> {
    (0..RESIDUAL_POINTS).map(|j| -0.95 + 1.9 * j as f64 / (RESIDUAL_POINTS - 1) as f64)
}

/// Builds the normalized solution from ρ̃/E coefficients and the field operator.
///
/// `mass_share` is the mass carried by the stored interval.
#[allow(clippy::too_many_arguments)]
pub fn normalize_and_energy(
    raw: &[f64],
    field_op: &DMatrix<f64>,
    basis: BasisParam,
    support: SupportSpec,
    mass: f64,
    mass_share: f64,
    method: SolveMethod,
    seed_error: f64,
) -> Result<EquilibriumSolution> {
    let interval = support.primary();
    let raw_exp = WeightedExpansion::new(basis, raw.to_vec(), interval);
    let raw_mass = raw_exp.integral();
    if !(raw_mass.abs() > 1e-300) || !raw_mass.is_finite() {
        return Err(Error::Degenerate(
            "leading coefficient vanishes; mass cannot be normalized".into(),
        ));
    }
    let e_mass = mass_share / raw_mass;
    let measure = raw_exp.scaled(e_mass);
    let field: Vec<f64> = (field_op * DVector::from_column_slice(&measure.coeffs))
        .iter()
        .copied()
        .collect();
    let energy = synthesis(basis, &field, ENERGY_POINT);
    let residual = residual_points()
        .map(|t| (synthesis(basis, &field, t) - energy).abs())
        .fold(0.0, f64::max);
    let mass_check = match support {
        SupportSpec::Interval { .. } => measure.integral(),
        SupportSpec::SymmetricPair { .. } => 2.0 * measure.integral(),
    };
    let min_density = min_on_grid(basis, &measure.coeffs);
    let pieces = match support {
        SupportSpec::Interval { .. } => 1.0,
        SupportSpec::SymmetricPair { .. } => 2.0,
    };
    let interaction =
        0.5 * pieces * interval.half_width() * weighted_dot(basis, &field, &measure.coeffs);
    Ok(EquilibriumSolution {
        interaction,
        diagnostics: Diagnostics {
            residual,
            method,
            lambda: basis.lambda(),
            size: raw.len(),
            seed_error,
            energy_from_mass: e_mass,
        },
        measure,
        support,
        energy,
        mass,
        mass_check,
        min_density,
        field,
    })
}

fn padded(m: &OperatorMatrix, rows: usize) -> DMatrix<f64> {
    m.resized(rows, m.cols())
}

fn scale(power: f64, half_width: f64) -> f64 {
    half_width.powf(power + 1.0) / power
}

/// Attractive–repulsive problem on a single interval.
///
/// The operators do not depend on the support, so they are built once and
/// reused for every interval.
#[derive(Debug, Clone)]
pub struct SingleIntervalSolver {
    pub spec: ProblemSpec,
    pub basis: BasisParam,
    pub q_alpha: PowerLawOperator,
    pub q_beta: PowerLawOperator,
    rows: usize,
}

impl SingleIntervalSolver {
    pub fn new(spec: &ProblemSpec) -> Result<Self> {
        spec.validate()?;
        let beta = spec
            .beta
            .ok_or_else(|| invalid("attractive-repulsive solver needs a repulsive power"))?;
        let basis = spec.basis()?;
        let q_alpha = PowerLawOperator::build(spec.alpha, basis, spec.size, &spec.operator)?;
        let q_beta = PowerLawOperator::build(beta, basis, spec.size, &spec.operator)?;
        let rows = q_alpha.matrix.rows().max(q_beta.matrix.rows());
        Ok(Self {
            spec: spec.clone(),
            basis,
            q_alpha,
            q_beta,
            rows,
        })
    }

    pub fn seed_error(&self) -> f64 {
        self.q_alpha.seeds.error().max(self.q_beta.seeds.error())
    }

    /// F = (1/α)R^{α+1}Q^α − (1/β)R^{β+1}Q^β with all available rows.
    pub fn assemble(&self, support: Interval) -> DMatrix<f64> {
        let r = support.half_width();
        let (a, b) = (self.q_alpha.alpha.value(), self.q_beta.alpha.value());
        padded(&self.q_alpha.matrix, self.rows) * scale(a, r)
            - padded(&self.q_beta.matrix, self.rows) * scale(b, r)
    }

    pub fn solve(&self, support: Interval) -> Result<EquilibriumSolution> {
        self.solve_with(support, SolveMethod::from_parameter(self.spec.tikhonov))
    }

    pub fn solve_with(
        &self,
        support: Interval,
        method: SolveMethod,
    ) -> Result<EquilibriumSolution> {
        let f = self.assemble(support);
        let mut rhs = vec![0.0; self.spec.size];
        rhs[0] = 1.0;
        let raw = solve_method(&f, &rhs, self.spec.size, method)?;
        normalize_and_energy(
            &raw,
            &f,
            self.basis,
            SupportSpec::Interval {
                a: support.a,
                b: support.b,
            },
            self.spec.mass,
            self.spec.mass,
            method,
            self.seed_error(),
        )
    }
}

/// F and rhs = e₀ for the attractive–repulsive problem on one interval.
pub fn assemble_system(
    spec: &ProblemSpec,
    support: SupportSpec,
    size: usize,
) -> Result<(OperatorMatrix, Vec<f64>)> {
    let spec = spec.clone().size(size);
    let mut rhs = vec![0.0; size];
    rhs[0] = 1.0;
    match support {
        SupportSpec::Interval { a, b } => {
            let solver = SingleIntervalSolver::new(&spec)?;
            let f = solver.assemble(Interval::new(a, b)?);
            Ok((OperatorMatrix::new(f, Structure::Dense), rhs))
        }
        SupportSpec::SymmetricPair { a, b } => {
            let solver = TwoIntervalSolver::new(&spec)?;
            Ok((
                OperatorMatrix::new(solver.assemble(a, b)?, Structure::Dense),
                rhs,
            ))
        }
    }
}

/// Problem with an external potential on a single interval.
#[derive(Debug, Clone)]
pub struct PotentialSolver {
    pub spec: ProblemSpec,
    pub basis: BasisParam,
    pub q_alpha: PowerLawOperator,
    dq: DMatrix<f64>,
}

const POTENTIAL_MAX_DEGREE: usize = 1024;

impl PotentialSolver {
    pub fn new(spec: &ProblemSpec) -> Result<Self> {
        spec.validate()?;
        if spec.potential.is_none() {
            return Err(invalid(
                "potential solver needs an external potential; use the attractive-repulsive path",
            ));
        }
        let basis = spec.basis()?;
        let q_alpha = PowerLawOperator::build(spec.alpha, basis, spec.size, &spec.operator)?;
        let q = &q_alpha.matrix.entries;
        let dq = DMatrix::from_fn(q.nrows() - 1, q.ncols(), |i, j| {
            2.0 * basis.lambda() * q[(i + 1, j)]
        });
        Ok(Self {
            spec: spec.clone(),
            basis,
            q_alpha,
            dq,
        })
    }

    fn potential(&self) -> &ExternalPotential {
        self.spec
            .potential
            .as_ref()
            .expect("checked at construction")
    }

    /// C^{(λ)} coefficients of V on the interval, resolved to rounding.
    pub fn potential_coefficients(&self, support: Interval) -> Result<Vec<f64>> {
        let v = self.potential();
        let mut n = 16;
        loop {
            let c = chebyshev::interpolate(|t| v.eval(support.to_global(t)), n);
            let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
            let tail = c[n - 3..].iter().fold(0.0f64, |m, x| m.max(x.abs()));
            if tail <= 1e-14 * scale {
                let last = c.iter().rposition(|x| x.abs() > 1e-17 * scale).unwrap_or(0);
                return Ok(from_chebyshev(self.basis, &c[..=last]));
            }
            if n >= POTENTIAL_MAX_DEGREE {
                return Err(Error::PotentialNotResolved {
                    degree: n,
                    tail: tail / scale,
                });
            }
            n *= 2;
        }
    }

    pub fn solve(&self, support: Interval) -> Result<EquilibriumSolution> {
        self.solve_with(support, SolveMethod::from_parameter(self.spec.tikhonov))
    }

    /// Solves the differentiated system (1/α)R^{α+1} D Q c = D V for c₁…c_{n−1}
    /// with c₀ fixed by the mass.
    pub fn solve_with(
        &self,
        support: Interval,
        method: SolveMethod,
    ) -> Result<EquilibriumSolution> {
        let n = self.spec.size;
        let alpha = self.spec.alpha.value();
        let r = support.half_width();
        let k = scale(alpha, r);
        let v = self.potential_coefficients(support)?;
        let dv = differentiate(self.basis, &v);
        let c0 = self.spec.mass / (r * self.basis.weight_integral());
        let m = n - 1;
        let a = DMatrix::from_fn(m, m, |i, j| k * self.dq[(i, j + 1)]);
        let rhs: Vec<f64> = (0..m)
            .map(|i| dv.get(i).copied().unwrap_or(0.0) - c0 * k * self.dq[(i, 0)])
            .collect();
        let rest = solve_method(&a, &rhs, m, method)?;
        let mut coeffs = Vec::with_capacity(n);
        coeffs.push(c0);
        coeffs.extend(rest);
        let measure = WeightedExpansion::new(self.basis, coeffs, support);
        let q = &self.q_alpha.matrix.entries;
        let field: Vec<f64> = (q * DVector::from_column_slice(&measure.coeffs) * (-k))
            .iter()
            .copied()
            .collect();
        let pot = self.potential();
        let total = |t: f64| synthesis(self.basis, &field, t) + pot.eval(support.to_global(t));
        let energy = total(ENERGY_POINT);
        let residual = residual_points()
            .map(|t| (total(t) - energy).abs())
            .fold(0.0, f64::max);
        let min_density = min_on_grid(self.basis, &measure.coeffs);
        let interaction = r
            * (0.5 * weighted_dot(self.basis, &field, &measure.coeffs)
                + weighted_dot(self.basis, &v, &measure.coeffs));
        Ok(EquilibriumSolution {
            interaction,
            diagnostics: Diagnostics {
                residual,
                method,
                lambda: self.basis.lambda(),
                size: n,
                seed_error: self.q_alpha.seeds.error(),
                energy_from_mass: energy,
            },
            mass_check: measure.integral(),
            support: SupportSpec::Interval {
                a: support.a,
                b: support.b,
            },
            measure,
            energy,
            mass: self.spec.mass,
            min_density,
            field,
        })
    }
}

pub fn solve_with_potential(
    spec: &ProblemSpec,
    support: Interval,
    size: usize,
) -> Result<EquilibriumSolution> {
    PotentialSolver::new(&spec.clone().size(size))?.solve(support)
}

/// Attractive–repulsive problem on [−b, −a] ∪ [a, b] with mirror-symmetric density.
#[derive(Debug, Clone)]
pub struct TwoIntervalSolver {
    pub spec: ProblemSpec,
    pub basis: BasisParam,
    pub q_alpha: PowerLawOperator,
    pub q_beta: PowerLawOperator,
    rows: usize,
}

impl TwoIntervalSolver {
    pub fn new(spec: &ProblemSpec) -> Result<Self> {
        let single = SingleIntervalSolver::new(spec)?;
        Ok(Self {
            spec: single.spec,
            basis: single.basis,
            q_alpha: single.q_alpha,
            q_beta: single.q_beta,
            rows: single.rows,
        })
    }

    /// Near plus far-field operators for both powers.
    pub fn assemble(&self, a: f64, b: f64) -> Result<DMatrix<f64>> {
        let r = 0.5 * (b - a);
        let size = self.spec.size;
        let mut total = DMatrix::zeros(self.rows, size);
        for (op, sign) in [(&self.q_alpha, 1.0), (&self.q_beta, -1.0)] {
            let p = op.alpha.value();
            let far = FarFieldOperator::build(op.alpha, self.basis, size, self.rows, a, b)?;
            total += (padded(&op.matrix, self.rows) + far.matrix.entries) * (sign * scale(p, r));
        }
        Ok(total)
    }

    pub fn solve(&self, a: f64, b: f64) -> Result<EquilibriumSolution> {
        let support = SupportSpec::pair(a, b)?;
        let method = SolveMethod::from_parameter(self.spec.tikhonov);
        let f = self.assemble(a, b)?;
        let mut rhs = vec![0.0; self.spec.size];
        rhs[0] = 1.0;
        let raw = solve_method(&f, &rhs, self.spec.size, method)?;
        normalize_and_energy(
            &raw,
            &f,
            self.basis,
            support,
            self.spec.mass,
            0.5 * self.spec.mass,
            method,
            self.q_alpha.seeds.error().max(self.q_beta.seeds.error()),
        )
    }
}

pub fn solve_two_interval(
    spec: &ProblemSpec,
    a: f64,
    b: f64,
    size: usize,
) -> Result<EquilibriumSolution> {
    if a >= b {
        return Err(invalid(format!(
            "two-interval support needs a < b, got ({a}, {b})"
        )));
    }
    if !(a > 0.0) {
        return Err(Error::Domain(format!(
            "two-interval support needs a > 0, got {a}"
        )));
    }
    TwoIntervalSolver::new(&spec.clone().size(size))?.solve(a, b)
}

/// JSON record of a solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub schema: String,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub potential: Option<String>,
    pub mass: f64,
    pub support: SupportSpec,
    pub lambda: f64,
    pub n: usize,
    pub s: f64,
    pub coeffs: Vec<f64>,
    pub energy: f64,
    pub interaction: f64,
    pub min_density: f64,
    pub residual: f64,
}

pub const SOLUTION_SCHEMA: &str = "eqmeasure.solution/1";

impl SolutionRecord {
    pub fn new(spec: &ProblemSpec, sol: &EquilibriumSolution) -> Self {
        Self {
            schema: SOLUTION_SCHEMA.into(),
            alpha: spec.alpha.value(),
            beta: spec.beta.map(|b| b.value()),
            potential: spec.potential.as_ref().map(|p| p.name.clone()),
            mass: sol.mass,
            support: sol.support,
            lambda: sol.measure.basis.lambda(),
            n: sol.measure.coeffs.len(),
            s: match sol.diagnostics.method {
                SolveMethod::Direct => 0.0,
                SolveMethod::Tikhonov(s) => s,
            },
            coeffs: sol.measure.coeffs.clone(),
            energy: sol.energy,
            interaction: sol.interaction,
            min_density: sol.min_density,
            residual: sol.diagnostics.residual,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validation::analytic_solution;

    #[test]
    fn tikhonov_with_zero_shift_is_direct() {
        let f = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let rhs = [1.0, 2.0, 3.0];
        let a = solve_direct(&f, &rhs, 3).unwrap();
        let b = solve_tikhonov(&f, &rhs, 0.0).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-14);
        }
        assert_eq!(SolveMethod::from_parameter(0.0), SolveMethod::Direct);
        assert_eq!(
            SolveMethod::from_parameter(1e-13),
            SolveMethod::Tikhonov(1e-13)
        );
    }

    #[test]
    fn tikhonov_shrinks_the_solution() {
        let f = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-6]);
        let x = solve_tikhonov(&f, &[1.0, 1.0], 1e-6).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-5);
        assert!(x[1] < 1e-6 / (1e-12 + 1e-6) * 1.0001);
        assert!(solve_direct(&DMatrix::zeros(2, 2), &[1.0, 0.0], 2).is_err());
    }

    #[test]
    fn exact_radius_reproduces_closed_form() {
        let exact = analytic_solution(2.0, 1.5, 1.0).unwrap();
        let spec = ProblemSpec::attractive_repulsive(2.0, 1.5, 1.0)
            .unwrap()
            .size(20);
        let sol = SingleIntervalSolver::new(&spec)
            .unwrap()
            .solve(Interval::symmetric(exact.radius).unwrap())
            .unwrap();
        assert!((sol.mass_check - 1.0).abs() < 1e-13);
        assert!(sol.diagnostics.residual < 1e-12);
        for x in [-0.8, -0.3, 0.0, 0.5, 0.85] {
            let (got, want) = (sol.density(x), exact.density(x));
            assert!((got - want).abs() < 1e-11 * want, "{x}: {got} vs {want}");
        }
        assert_eq!(sol.density(0.9), 0.0);
    }

    #[test]
    fn potential_problem_needs_a_potential() {
        let spec = ProblemSpec::attractive_repulsive(2.0, 1.5, 1.0).unwrap();
        assert!(PotentialSolver::new(&spec).is_err());
        let pot = ProblemSpec::with_potential(0.5, ExternalPotential::new("x^2", |x| x * x), 1.0)
            .unwrap();
        assert!(SingleIntervalSolver::new(&pot).is_err());
    }
}
