//! Outer optimization over support boundaries and parameter scans.

use crate::error::{invalid, Error, Result};
use crate::optimize::{golden_section, nelder_mead, newton_1d, newton_2d, NelderMeadOptions};
use crate::solver::{
    EquilibriumSolution, PotentialSolver, ProblemSpec, SingleIntervalSolver, TwoIntervalSolver,
    POSITIVITY_TOL,
};
use crate::ultraspherical::Interval;
use crate::validation::particle_support_guess;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerMethod {
    NewtonLinesearch,
    NelderMead,
    GoldenSection,
}

impl std::str::FromStr for OptimizerMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "newton-linesearch" | "newton" => Ok(Self::NewtonLinesearch),
            "nelder-mead" => Ok(Self::NelderMead),
            "golden-section" | "golden" => Ok(Self::GoldenSection),
            other => Err(invalid(format!("unknown optimizer method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizeConfig {
    pub method: OptimizerMethod,
    pub tol_x: f64,
    pub tol_f: f64,
    pub max_iter: usize,
    /// Weight w in I + w·max(0, −min density)², I the total energy.
    pub penalty_weight: f64,
    /// Fail instead of returning a minimizer whose density is negative.
    pub require_admissible: bool,
    /// Radius bracket for the univariate search.
    pub bracket: (f64, f64),
    /// Log-spaced samples used to locate the basin before refinement.
    pub scan_points: usize,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            method: OptimizerMethod::NewtonLinesearch,
            tol_x: 1e-10,
            tol_f: 1e-14,
            max_iter: 200,
            penalty_weight: 1e4,
            require_admissible: true,
            bracket: (0.1, 5.0),
            scan_points: 48,
        }
    }
}

impl OptimizeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_x > 0.0 && self.tol_f > 0.0) {
            return Err(invalid("optimizer tolerances must be positive"));
        }
        if !(self.penalty_weight >= 0.0) {
            return Err(invalid("penalty weight must be nonnegative"));
        }
        let (lo, hi) = self.bracket;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(invalid(format!(
                "radius bracket ({lo}, {hi}) must satisfy 0 < lo < hi"
            )));
        }
        if self.scan_points < 3 || self.max_iter == 0 {
            return Err(invalid("scan needs at least 3 points and max_iter ≥ 1"));
        }
        Ok(())
    }

    /// Keeps the penalty but returns the best candidate even when its density
    /// is negative somewhere, as needed by scans.
    pub fn allow_inadmissible(mut self) -> Self {
        self.require_admissible = false;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub radius: f64,
    /// Euler–Lagrange constant.
    pub energy: f64,
    /// Total energy, the minimized quantity.
    pub interaction: f64,
    pub min_density: f64,
    pub admissible: bool,
    pub error: Option<String>,
}

fn penalized(energy: f64, min_density: f64, weight: f64) -> f64 {
    let neg = (-min_density).max(0.0);
    energy + weight * neg * neg
}

enum RadialSolver {
    Pair(SingleIntervalSolver),
    Potential(PotentialSolver),
}

impl RadialSolver {
    fn new(spec: &ProblemSpec) -> Result<Self> {
        match &spec.potential {
            None => Ok(Self::Pair(SingleIntervalSolver::new(spec)?)),
            Some(_) => Ok(Self::Potential(PotentialSolver::new(spec)?)),
        }
    }

    fn solve(&self, support: Interval) -> Result<EquilibriumSolution> {
        match self {
            Self::Pair(s) => s.solve(support),
            Self::Potential(s) => s.solve(support),
        }
    }

    fn solve_radius(&self, r: f64) -> Result<EquilibriumSolution> {
        self.solve(Interval::symmetric(r)?)
    }

    fn objective(&self, sol: &EquilibriumSolution) -> f64 {
        objective_of(matches!(self, Self::Potential(_)), sol)
    }
}

/// Quantity minimized over supports.
///
/// With a potential the weighted basis holds the exact solution on every
/// interval, so the Euler–Lagrange constant is smooth in the endpoints and
/// minimal at the support. Without one the basis is exact only at the optimum
/// and the constant is not an energy elsewhere; the total energy of the
/// computed measure is minimized instead, which every admissible candidate
/// bounds from above.
fn objective_of(potential: bool, sol: &EquilibriumSolution) -> f64 {
    if potential {
        sol.energy
    } else {
        sol.interaction
    }
}

fn sample(solver: &RadialSolver, r: f64) -> EnergySample {
    match solver.solve_radius(r) {
        Ok(sol) => EnergySample {
            radius: r,
            energy: sol.energy,
            interaction: sol.interaction,
            min_density: sol.min_density,
            admissible: sol.is_positive(),
            error: None,
        },
        Err(e) => EnergySample {
            radius: r,
            energy: f64::NAN,
            interaction: f64::NAN,
            min_density: f64::NAN,
            admissible: false,
            error: Some(e.to_string()),
        },
    }
}

fn check_even_potential(spec: &ProblemSpec) -> Result<()> {
    if let Some(v) = &spec.potential {
        for k in 1..=16 {
            let x = 0.37 * k as f64;
            let (p, m) = (v.eval(x), v.eval(-x));
            if (p - m).abs() > 1e-12 * p.abs().max(m.abs()).max(1.0) {
                return Err(invalid(format!(
                    "radius search needs an even potential; V({x}) ≠ V(−{x}); use optimize_interval"
                )));
            }
        }
    }
    Ok(())
}

/// Finite-difference step of the Newton polish, relative to max(1, R).
///
/// The energy is flat to second order at the minimizer, so its rounding
/// noise (~1e−17) swamps a derivative taken with steps near 1e−6; the
/// five-point stencil at this step removes the cubic bias instead.
const NEWTON_STEP: f64 = 1e-4;

/// Nearest point where the min density changes sign, within `max_dist` of r,
/// refined by bisection. Returns (admissible side, inadmissible side).
fn admissibility_boundary(solver: &RadialSolver, r: f64, max_dist: f64) -> Option<(f64, f64)> {
    let min_at = |x: f64| {
        solver
            .solve_radius(x)
            .map(|s| s.min_density)
            .unwrap_or(f64::NAN)
    };
    let inside = min_at(r) >= 0.0;
    let mut d = 1e-12 * r;
    let mut other = None;
    'search: while d <= max_dist {
        for x in [r - d, r + d] {
            let m = min_at(x);
            if x > 0.0 && m.is_finite() && (m >= 0.0) != inside {
                other = Some(x);
                break 'search;
            }
        }
        d *= 2.0;
    }
    let (mut good, mut bad) = if inside { (r, other?) } else { (other?, r) };
    for _ in 0..200 {
        if (good - bad).abs() <= 4.0 * f64::EPSILON * r {
            break;
        }
        let mid = 0.5 * (good + bad);
        if min_at(mid) >= 0.0 {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Some((good, bad))
}

/// Moves the minimizer onto the edge of the admissible set when the
/// constraint is active there.
///
/// The penalized minimum of an active constraint lies a little outside the
/// admissible set, or inside it within the optimizer's resolution. The edge is
/// taken when the optimum is inadmissible or the unpenalized objective still
/// decreases across it.
fn snap_to_boundary(solver: &RadialSolver, r: f64) -> f64 {
    let Some((good, bad)) = admissibility_boundary(solver, r, 1e-4 * r) else {
        return r;
    };
    let value = |x: f64| {
        solver
            .solve_radius(x)
            .map(|s| (solver.objective(&s), s.min_density))
    };
    let Ok((_, m_opt)) = value(r) else {
        return good;
    };
    if m_opt < -POSITIVITY_TOL {
        return good;
    }
    let h = 1e-5 * good * (bad - good).signum();
    match (value(good), value(good - h)) {
        (Ok((f_edge, _)), Ok((f_in, _))) if f_edge < f_in => good,
        _ => r,
    }
}

/// Shrinks [a, b] about its midpoint until the min density is nonnegative,
/// for minimizers that end marginally outside the admissible set.
fn shrink_to_admissible(solver: &RadialSolver, a: f64, b: f64, max_rel: f64) -> Option<(f64, f64)> {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let at = |eps: f64| (mid - (1.0 - eps) * half, mid + (1.0 - eps) * half);
    let ok = |eps: f64| {
        let (x, y) = at(eps);
        Interval::new(x, y)
            .and_then(|i| solver.solve(i))
            .map(|s| s.min_density >= 0.0)
            .unwrap_or(false)
    };
    if !ok(max_rel) {
        return None;
    }
    let (mut lo, mut hi) = (0.0, max_rel);
    for _ in 0..100 {
        if hi - lo <= 4.0 * f64::EPSILON {
            break;
        }
        let m = 0.5 * (lo + hi);
        if ok(m) {
            hi = m;
        } else {
            lo = m;
        }
    }
    Some(at(hi))
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (l, h) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (l + (h - l) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Energies and min density on the given radii.
pub fn energy_curve(spec: &ProblemSpec, radii: &[f64]) -> Result<Vec<EnergySample>> {
    check_even_potential(spec)?;
    let solver = RadialSolver::new(spec)?;
    Ok(radii.iter().map(|&r| sample(&solver, r)).collect())
}

/// Minimizes the total energy over symmetric supports [−R, R].
///
/// A log-spaced scan over the bracket picks the lowest interior local minimum
/// of the penalized energy, preferring basins whose density is admissible. The
/// basin is refined by golden section and, for the Newton method, polished by
/// finite-difference Newton steps.
pub fn optimize_radius(spec: &ProblemSpec, config: &OptimizeConfig) -> Result<EquilibriumSolution> {
    config.validate()?;
    check_even_potential(spec)?;
    let solver = RadialSolver::new(spec)?;
    let radii = log_grid(config.bracket.0, config.bracket.1, config.scan_points);
    let samples: Vec<EnergySample> = radii.iter().map(|&r| sample(&solver, r)).collect();
    let weight = config.penalty_weight;
    let f_of = |s: &EnergySample| {
        if s.error.is_some() || !s.interaction.is_finite() {
            f64::INFINITY
        } else {
            penalized(s.interaction, s.min_density, weight)
        }
    };
    let vals: Vec<f64> = samples.iter().map(f_of).collect();
    let mut minima: Vec<usize> = (1..vals.len() - 1)
        .filter(|&i| vals[i].is_finite() && vals[i] <= vals[i - 1] && vals[i] <= vals[i + 1])
        .collect();
    minima.sort_by(|&i, &j| {
        let key = |k: usize| (!samples[k].admissible, vals[k]);
        let (ai, vi) = key(i);
        let (aj, vj) = key(j);
        ai.cmp(&aj).then(vi.total_cmp(&vj))
    });
    let no_minimum = || Error::NoAdmissibleMinimum {
        samples: samples
            .iter()
            .map(|s| (s.radius, s.interaction, s.min_density))
            .collect(),
    };
    let &best = minima.first().ok_or_else(no_minimum)?;
    let (lo, hi) = (radii[best - 1], radii[best + 1]);
    let objective = |r: f64| -> f64 {
        match solver.solve_radius(r) {
            Ok(sol) if solver.objective(&sol).is_finite() => {
                penalized(solver.objective(&sol), sol.min_density, weight)
            }
            _ => f64::INFINITY,
        }
    };
    let golden_tol = match config.method {
        OptimizerMethod::GoldenSection => config.tol_x,
        _ => 1e-7 * hi,
    };
    let r_golden = golden_section(objective, lo, hi, golden_tol, config.max_iter).x[0];
    let mut r = r_golden;
    match config.method {
        OptimizerMethod::NewtonLinesearch => {
            let h = NEWTON_STEP * r.max(1.0);
            r = newton_1d(objective, r, (lo, hi), h, config.tol_x, config.max_iter).x[0];
        }
        OptimizerMethod::NelderMead => {
            let m = nelder_mead(
                |v: &[f64]| {
                    if v[0] > 0.0 {
                        objective(v[0])
                    } else {
                        f64::INFINITY
                    }
                },
                &[r],
                &[1e-3 * r],
                NelderMeadOptions {
                    tol_x: config.tol_x,
                    tol_f: config.tol_f,
                    max_iter: config.max_iter,
                },
            );
            r = m.x[0];
        }
        OptimizerMethod::GoldenSection => {}
    }
    if weight > 0.0 {
        r = snap_to_boundary(&solver, r);
    }
    let sol = solver.solve_radius(r)?;
    if config.require_admissible && !sol.is_positive() {
        return Err(no_minimum());
    }
    Ok(sol)
}

/// Minimizes the total energy over single-interval supports [a, b] with the positivity penalty.
///
/// Nelder–Mead by default; the Newton method adds a finite-difference Newton
/// polish after the simplex stage.
pub fn optimize_interval(
    spec: &ProblemSpec,
    config: &OptimizeConfig,
    init: (f64, f64),
) -> Result<EquilibriumSolution> {
    config.validate()?;
    let (a0, b0) = init;
    if !(b0 > a0) {
        return Err(invalid(format!(
            "initial interval needs a < b, got ({a0}, {b0})"
        )));
    }
    let solver = RadialSolver::new(spec)?;
    let weight = config.penalty_weight;
    let objective = |v: &[f64]| -> f64 {
        if !(v[1] > v[0]) {
            return f64::INFINITY;
        }
        match Interval::new(v[0], v[1]).and_then(|i| solver.solve(i)) {
            Ok(sol) if solver.objective(&sol).is_finite() => {
                penalized(solver.objective(&sol), sol.min_density, weight)
            }
            _ => f64::INFINITY,
        }
    };
    let step = 0.1 * (b0 - a0);
    let m = nelder_mead(
        objective,
        &[a0, b0],
        &[step, step],
        NelderMeadOptions {
            tol_x: config.tol_x.max(1e-9),
            tol_f: config.tol_f,
            max_iter: config.max_iter.max(400),
        },
    );
    if !m.converged {
        return Err(Error::Optimization(format!(
            "simplex did not converge after {} iterations at ({}, {})",
            m.iterations, m.x[0], m.x[1]
        )));
    }
    let mut x = m.x.clone();
    if config.method == OptimizerMethod::NewtonLinesearch {
        let h = NEWTON_STEP * (x[1] - x[0]).abs().max(1.0);
        let p = newton_2d(objective, &x, h, config.tol_x, 30);
        if p.f <= m.f {
            x = p.x;
        }
    }
    let mut sol = solver.solve(Interval::new(x[0], x[1])?)?;
    if weight > 0.0 && !sol.is_positive() {
        if let Some((a, b)) = shrink_to_admissible(&solver, x[0], x[1], 1e-4) {
            sol = solver.solve(Interval::new(a, b)?)?;
        }
    }
    if config.require_admissible && !sol.is_positive() {
        return Err(Error::NoAdmissibleMinimum {
            samples: vec![(x[1] - x[0], sol.interaction, sol.min_density)],
        });
    }
    Ok(sol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourCell {
    pub a: f64,
    pub b: f64,
    pub energy: f64,
    pub interaction: f64,
    pub min_density: f64,
    pub admissible: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyContour {
    pub a_values: Vec<f64>,
    pub b_values: Vec<f64>,
    /// Row-major in a, then b.
    pub cells: Vec<ContourCell>,
}

impl EnergyContour {
    /// Admissible cell with the lowest energy.
    pub fn best_admissible(&self) -> Option<&ContourCell> {
        self.cells
            .iter()
            .filter(|c| c.admissible && c.interaction.is_finite())
            .min_by(|x, y| x.interaction.total_cmp(&y.interaction))
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# eqmeasure.contour/1")?;
        writeln!(w, "a,b,energy,interaction,min_density,admissible")?;
        for c in &self.cells {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                c.a, c.b, c.energy, c.interaction, c.min_density, c.admissible
            )?;
        }
        Ok(())
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Two-interval energies on an (a, b) grid; cells with a ≥ b or failed solves
/// are recorded with an error instead of aborting.
pub fn energy_contour(
    spec: &ProblemSpec,
    a_range: (f64, f64),
    b_range: (f64, f64),
    grid: (usize, usize),
) -> Result<EnergyContour> {
    if !(a_range.0 > 0.0 && b_range.0 > 0.0) || a_range.1 < a_range.0 || b_range.1 < b_range.0 {
        return Err(invalid("contour ranges must be positive and ordered"));
    }
    if grid.0 == 0 || grid.1 == 0 {
        return Err(invalid("contour grid needs at least one point per axis"));
    }
    let solver = TwoIntervalSolver::new(spec)?;
    let a_values = linspace(a_range.0, a_range.1, grid.0);
    let b_values = linspace(b_range.0, b_range.1, grid.1);
    let pairs: Vec<(f64, f64)> = a_values
        .iter()
        .flat_map(|&a| b_values.iter().map(move |&b| (a, b)))
        .collect();
    let cells = pairs
        .par_iter()
        .map(|&(a, b)| match solver.solve(a, b) {
            Ok(sol) => ContourCell {
                a,
                b,
                energy: sol.energy,
                interaction: sol.interaction,
                min_density: sol.min_density,
                admissible: sol.min_density >= -POSITIVITY_TOL,
                error: None,
            },
            Err(e) => ContourCell {
                a,
                b,
                energy: f64::NAN,
                interaction: f64::NAN,
                min_density: f64::NAN,
                admissible: false,
                error: Some(e.to_string()),
            },
        })
        .collect();
    Ok(EnergyContour {
        a_values,
        b_values,
        cells,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportVerdict {
    TwoInterval,
    /// The minimizer ran into a → 0: the single interval is likely admissible.
    SingleIntervalLikely,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoIntervalOptions {
    /// Skip the single-interval gap check.
    pub force: bool,
    pub init: Option<(f64, f64)>,
    /// Swarm size for the starting guess when no `init` is given.
    pub particles: usize,
    pub seed: u64,
    /// Inner boundaries below this fraction of b count as a → 0.
    pub collapse_ratio: f64,
}

impl Default for TwoIntervalOptions {
    fn default() -> Self {
        Self {
            force: false,
            init: None,
            particles: 200,
            seed: 0,
            collapse_ratio: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoIntervalOutcome {
    pub verdict: SupportVerdict,
    pub a: f64,
    pub b: f64,
    pub energy: f64,
    pub solution: Option<EquilibriumSolution>,
}

fn pair_min_density(solver: &TwoIntervalSolver, v: &[f64]) -> f64 {
    if !(v[0] > 0.0 && v[1] > v[0]) {
        return f64::NEG_INFINITY;
    }
    solver
        .solve(v[0], v[1])
        .map(|s| s.min_density)
        .unwrap_or(f64::NEG_INFINITY)
}

/// Minimizes the total energy over symmetric two-interval supports [−b, −a] ∪ [a, b].
///
/// The admissible set is a thin region of the (a, b) plane, so the search
/// runs in three stages: a starting guess from a small particle swarm, a
/// simplex ascent on the minimum density to reach a positive measure, and a
/// penalized energy descent from there. A final bisection toward the
/// positive anchor removes any remaining slight negativity.
pub fn optimize_two_interval(
    spec: &ProblemSpec,
    config: &OptimizeConfig,
    opts: &TwoIntervalOptions,
) -> Result<TwoIntervalOutcome> {
    config.validate()?;
    if let Some((a, b)) = opts.init {
        if !(a < b) {
            return Err(invalid(format!(
                "two-interval support needs a < b, got ({a}, {b})"
            )));
        }
        if !(a > 0.0) {
            return Err(Error::Domain(format!(
                "two-interval support needs a > 0, got {a}"
            )));
        }
    }
    if !opts.force {
        let single = optimize_radius(spec, &config.allow_inadmissible())?;
        if single.is_positive() {
            return Err(invalid(format!(
                "single-interval solution is admissible (min density {:.3e}); pass force to search anyway",
                single.min_density
            )));
        }
    }
    let beta = spec
        .beta
        .ok_or_else(|| invalid("two-interval search needs a repulsive power"))?
        .value();
    let (a0, b0, resolved) = match opts.init {
        Some((a, b)) => (a, b, true),
        None => {
            let g =
                particle_support_guess(spec.alpha.value(), beta, opts.particles.max(2), opts.seed)?;
            (g.inner, g.outer, g.has_gap())
        }
    };
    let collapsed = |a: f64, b: f64, f: f64| TwoIntervalOutcome {
        verdict: SupportVerdict::SingleIntervalLikely,
        a,
        b,
        energy: f,
        solution: None,
    };
    if !resolved || a0 <= opts.collapse_ratio * b0 {
        return Ok(collapsed(a0, b0, f64::NAN));
    }
    let solver = TwoIntervalSolver::new(spec)?;
    let simplex = |tol_f: f64| NelderMeadOptions {
        tol_x: config.tol_x.max(1e-9),
        tol_f,
        max_iter: config.max_iter.max(400),
    };
    let step = [0.02 * a0, 0.01 * b0];

    let ascent = nelder_mead(
        |v| -pair_min_density(&solver, v),
        &[a0, b0],
        &step,
        simplex(1e-12),
    );
    let anchor = [ascent.x[0], ascent.x[1]];
    let anchor_min = -ascent.f;
    if config.require_admissible && !(anchor_min >= -POSITIVITY_TOL) {
        return Err(Error::NoAdmissibleMinimum {
            samples: vec![(anchor[1], f64::NAN, anchor_min)],
        });
    }

    let weight = config.penalty_weight;
    let objective = |v: &[f64]| -> f64 {
        if !(v[0] > 0.0 && v[1] > v[0]) {
            return f64::INFINITY;
        }
        match solver.solve(v[0], v[1]) {
            Ok(sol) if sol.interaction.is_finite() => {
                penalized(sol.interaction, sol.min_density, weight)
            }
            _ => f64::INFINITY,
        }
    };
    let m = nelder_mead(objective, &anchor, &step, simplex(config.tol_f));
    let (mut a, mut b) = (m.x[0], m.x[1]);
    if a <= opts.collapse_ratio * b {
        return Ok(collapsed(a, b, m.f));
    }
    if !m.converged {
        return Err(Error::Optimization(format!(
            "two-interval simplex did not converge after {} iterations",
            m.iterations
        )));
    }
    let mut sol = solver.solve(a, b)?;
    if !sol.is_positive() && anchor_min >= 0.0 {
        // pull back along the segment toward the positive anchor
        let (mut good, mut bad) = (1.0f64, 0.0f64);
        for _ in 0..40 {
            let t = 0.5 * (good + bad);
            let v = [a + t * (anchor[0] - a), b + t * (anchor[1] - b)];
            if pair_min_density(&solver, &v) >= 0.0 {
                good = t;
            } else {
                bad = t;
            }
        }
        a += good * (anchor[0] - a);
        b += good * (anchor[1] - b);
        sol = solver.solve(a, b)?;
    }
    if config.require_admissible && !sol.is_positive() {
        return Err(Error::NoAdmissibleMinimum {
            samples: vec![(b, sol.interaction, sol.min_density)],
        });
    }
    Ok(TwoIntervalOutcome {
        verdict: SupportVerdict::TwoInterval,
        a,
        b,
        energy: sol.interaction,
        solution: Some(sol),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapCell {
    pub alpha: f64,
    pub beta: f64,
    pub radius: f64,
    pub energy: f64,
    pub min_density: f64,
    pub admissible: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapScanDefaults {
    pub mass: f64,
    pub size: usize,
    pub tikhonov: f64,
    pub config: OptimizeConfig,
}

impl Default for GapScanDefaults {
    fn default() -> Self {
        Self {
            mass: 1.0,
            size: 50,
            tikhonov: crate::solver::DEFAULT_TIKHONOV,
            config: OptimizeConfig::default().allow_inadmissible(),
        }
    }
}

pub const GAP_SCAN_SCHEMA: &str = "eqmeasure.gapscan/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapScanResult {
    pub alphas: Vec<f64>,
    pub betas: Vec<f64>,
    /// Row-major: one row of betas per alpha.
    pub cells: Vec<GapCell>,
    /// Zero level set of min density, as polylines of (α, β) points.
    pub boundary: Vec<Vec<[f64; 2]>>,
}

impl GapScanResult {
    pub fn cell(&self, i: usize, j: usize) -> &GapCell {
        &self.cells[i * self.betas.len() + j]
    }

    /// β values along the row α = alphas[i] where min density changes sign,
    /// located by linear interpolation.
    pub fn row_crossings(&self, i: usize) -> Vec<f64> {
        let nb = self.betas.len();
        let mut out = Vec::new();
        for j in 0..nb.saturating_sub(1) {
            let (c0, c1) = (self.cell(i, j), self.cell(i, j + 1));
            let (m0, m1) = (c0.min_density, c1.min_density);
            if m0.is_finite() && m1.is_finite() && (m0 >= 0.0) != (m1 >= 0.0) {
                out.push(c0.beta + (c1.beta - c0.beta) * m0 / (m0 - m1));
            }
        }
        out
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# {GAP_SCAN_SCHEMA}")?;
        writeln!(w, "alpha,beta,radius,energy,min_density,admissible")?;
        for c in &self.cells {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                c.alpha, c.beta, c.radius, c.energy, c.min_density, c.admissible
            )?;
        }
        Ok(())
    }

    pub fn boundary_json(&self) -> serde_json::Value {
        serde_json::json!({ "schema": GAP_SCAN_SCHEMA, "boundary": self.boundary })
    }
}

fn gap_cell(alpha: f64, beta: f64, d: &GapScanDefaults) -> GapCell {
    let run = || -> Result<EquilibriumSolution> {
        let spec = ProblemSpec::attractive_repulsive(alpha, beta, d.mass)?
            .size(d.size)
            .tikhonov(d.tikhonov);
        optimize_radius(&spec, &d.config)
    };
    match run() {
        Ok(sol) => GapCell {
            alpha,
            beta,
            radius: sol.hull().1,
            energy: sol.energy,
            min_density: sol.min_density,
            admissible: sol.is_positive(),
            error: None,
        },
        Err(e) => GapCell {
            alpha,
            beta,
            radius: f64::NAN,
            energy: f64::NAN,
            min_density: f64::NAN,
            admissible: false,
            error: Some(e.to_string()),
        },
    }
}

/// Single-interval optimum and its min density on an (α, β) lattice.
/// Cells run in parallel; failures are recorded per cell.
pub fn gap_scan(
    alphas: &[f64],
    betas: &[f64],
    defaults: &GapScanDefaults,
) -> Result<GapScanResult> {
    if alphas.is_empty() || betas.is_empty() {
        return Err(invalid("gap scan needs at least one alpha and one beta"));
    }
    for &a in alphas {
        for &b in betas {
            if !(a > b) {
                return Err(invalid(format!(
                    "gap scan needs alpha > beta on every cell, got ({a}, {b})"
                )));
            }
        }
    }
    let pairs: Vec<(f64, f64)> = alphas
        .iter()
        .flat_map(|&a| betas.iter().map(move |&b| (a, b)))
        .collect();
    let cells: Vec<GapCell> = pairs
        .par_iter()
        .map(|&(a, b)| gap_cell(a, b, defaults))
        .collect();
    let field: Vec<f64> = cells.iter().map(|c| c.min_density).collect();
    let boundary = marching_squares(alphas, betas, &field);
    Ok(GapScanResult {
        alphas: alphas.to_vec(),
        betas: betas.to_vec(),
        cells,
        boundary,
    })
}

/// Zero level set of a row-major field on an (x, y) lattice.
///
/// Segments from each square are chained into polylines; NaN corners skip the
/// square. Saddle squares are resolved by the centre average.
pub fn marching_squares(xs: &[f64], ys: &[f64], field: &[f64]) -> Vec<Vec<[f64; 2]>> {
    let (nx, ny) = (xs.len(), ys.len());
    let at = |i: usize, j: usize| field[i * ny + j];
    let mut segments: Vec<([f64; 2], [f64; 2])> = Vec::new();
    let cross = |p: [f64; 2], q: [f64; 2], fp: f64, fq: f64| -> [f64; 2] {
        let t = fp / (fp - fq);
        [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
    };
    for i in 0..nx.saturating_sub(1) {
        for j in 0..ny.saturating_sub(1) {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let v: Vec<f64> = corners.iter().map(|&(a, b)| at(a, b)).collect();
            if v.iter().any(|x| !x.is_finite()) {
                continue;
            }
            let p: Vec<[f64; 2]> = corners.iter().map(|&(a, b)| [xs[a], ys[b]]).collect();
            let mut pts = Vec::with_capacity(4);
            for e in 0..4 {
                let (k, l) = (e, (e + 1) % 4);
                if (v[k] >= 0.0) != (v[l] >= 0.0) {
                    pts.push((e, cross(p[k], p[l], v[k], v[l])));
                }
            }
            match pts.len() {
                2 => segments.push((pts[0].1, pts[1].1)),
                4 => {
                    let centre = v.iter().sum::<f64>() / 4.0;
                    // pair edges so that the centre's sign region stays connected
                    if (centre >= 0.0) == (v[0] >= 0.0) {
                        segments.push((pts[0].1, pts[3].1));
                        segments.push((pts[1].1, pts[2].1));
                    } else {
                        segments.push((pts[0].1, pts[1].1));
                        segments.push((pts[2].1, pts[3].1));
                    }
                }
                _ => {}
            }
        }
    }
    chain(segments)
}

fn chain(mut segments: Vec<([f64; 2], [f64; 2])>) -> Vec<Vec<[f64; 2]>> {
    let close =
        |p: [f64; 2], q: [f64; 2]| (p[0] - q[0]).abs() < 1e-12 && (p[1] - q[1]).abs() < 1e-12;
    // a zero at a lattice point yields zero-length segments in the neighbouring squares
    segments.retain(|&(p, q)| !close(p, q));
    let mut lines = Vec::new();
    while let Some((s, e)) = segments.pop() {
        let mut line = vec![s, e];
        loop {
            let tail = *line.last().unwrap();
            let head = line[0];
            if let Some(k) = segments
                .iter()
                .position(|&(p, q)| close(p, tail) || close(q, tail))
            {
                let (p, q) = segments.swap_remove(k);
                line.push(if close(p, tail) { q } else { p });
            } else if let Some(k) = segments
                .iter()
                .position(|&(p, q)| close(p, head) || close(q, head))
            {
                let (p, q) = segments.swap_remove(k);
                line.insert(0, if close(p, head) { q } else { p });
            } else {
                break;
            }
        }
        lines.push(line);
    }
    lines
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn marching_squares_circle() {
        let xs = linspace(-2.0, 2.0, 41);
        let ys = xs.clone();
        let field: Vec<f64> = xs
            .iter()
            .flat_map(|&x| ys.iter().map(move |&y| 1.0 - x * x - y * y))
            .collect();
        let lines = marching_squares(&xs, &ys, &field);
        assert_eq!(lines.len(), 1);
        for p in &lines[0] {
            assert!(((p[0] * p[0] + p[1] * p[1]).sqrt() - 1.0).abs() < 5e-3);
        }
        let l = &lines[0];
        assert!(close_loop(l));
    }

    fn close_loop(l: &[[f64; 2]]) -> bool {
        let (a, b) = (l[0], l[l.len() - 1]);
        (a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12
    }

    #[test]
    fn config_validation() {
        assert!(OptimizeConfig::default().validate().is_ok());
        let bad = OptimizeConfig {
            tol_x: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert_eq!(
            "nelder-mead".parse::<OptimizerMethod>().unwrap(),
            OptimizerMethod::NelderMead
        );
    }
}
