use crate::config::{Settings, UsageError};
use crate::output::Outputs;
use eqmeasure::solver::SolutionRecord;
use eqmeasure::support::{
    energy_contour, energy_curve, gap_scan, optimize_two_interval, SupportVerdict,
};
use eqmeasure::validation::{
    analytic_solution, coefficient_decay_report, histogram_compare, particle_simulate,
    root_search_measure, InitialDistribution, ParticleState, RootSearchOptions, SimulationConfig,
};
use eqmeasure::{
    optimize_interval, optimize_radius, EquilibriumSolution, ExternalPotential, GapScanDefaults,
    Interval, LambdaPolicy, OptimizeConfig, ProblemSpec, SingleIntervalSolver, TwoIntervalOptions,
};
use serde::Serialize;
use std::fmt;
use std::io;

#[derive(Debug)]
pub enum CliError {
    Usage(UsageError),
    Solver(eqmeasure::Error),
    Io(io::Error),
    /// A validation check did not pass.
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(e) => write!(f, "{e}"),
            CliError::Solver(e) => write!(f, "solver error: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Check(m) => write!(f, "validation failed: {m}"),
        }
    }
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e)
    }
}

impl From<eqmeasure::Error> for CliError {
    fn from(e: eqmeasure::Error) -> Self {
        match e {
            // bad parameter values are a usage problem, not a solver failure
            eqmeasure::Error::InvalidParameter(m) => CliError::Usage(UsageError(vec![m])),
            other => CliError::Solver(other),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(UsageError(vec![msg.into()]))
}

fn lambda_policy(s: &str) -> Result<LambdaPolicy> {
    match s {
        "auto" => Ok(LambdaPolicy::Auto),
        "alpha" => Ok(LambdaPolicy::FromAlpha),
        "beta" => Ok(LambdaPolicy::FromBeta),
        v => v.parse().map(LambdaPolicy::Explicit).map_err(|_| {
            usage(format!(
                "lambda: expected auto, alpha, beta or a number, got '{v}'"
            ))
        }),
    }
}

fn pair_spec(s: &Settings) -> Result<ProblemSpec> {
    let (alpha, beta) = (s.float("alpha")?, s.float("beta")?);
    if !(alpha > beta) {
        return Err(usage(format!("need alpha > beta, got ({alpha}, {beta})")));
    }
    let mut spec = ProblemSpec::attractive_repulsive(alpha, beta, s.float("mass")?)?
        .size(s.int("n")?)
        .tikhonov(s.float("s")?);
    if s.has("lambda") {
        spec = spec.lambda_policy(lambda_policy(s.text("lambda")?)?);
    }
    spec.validate()?;
    Ok(spec)
}

fn optimizer(s: &Settings) -> Result<OptimizeConfig> {
    let mut cfg = OptimizeConfig::default();
    if s.has("method") {
        cfg.method = s.text("method")?.parse()?;
    }
    if s.has("bracket") {
        cfg.bracket = s.pair("bracket")?;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct Summary<'a> {
    #[serde(flatten)]
    record: SolutionRecord,
    hull: (f64, f64),
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'a str>,
}

fn write_solution(out: &mut Outputs, spec: &ProblemSpec, sol: &EquilibriumSolution) -> Result<()> {
    out.json(
        "solution.json",
        &Summary {
            record: SolutionRecord::new(spec, sol),
            hull: sol.hull(),
            note: (!sol.is_positive()).then_some("density is negative somewhere on the support"),
        },
    )?;
    out.density(sol)?;
    Ok(())
}

pub fn solve(s: &Settings, out: &mut Outputs) -> Result<String> {
    let spec = pair_spec(s)?;
    if s.has("curve") {
        let radii = s.range("curve")?;
        if radii.iter().any(|r| !(*r > 0.0)) {
            return Err(usage("curve radii must be positive"));
        }
        let samples = energy_curve(&spec, &radii)?;
        let rows = samples.iter().map(|c| {
            format!(
                "{},{},{},{},{}",
                c.radius, c.energy, c.interaction, c.min_density, c.admissible
            )
        });
        out.csv(
            "energy_curve.csv",
            "eqmeasure.energy-curve/1",
            "radius,energy,interaction,min_density,admissible",
            rows,
        )?;
    }
    let sol = match s.opt_float("radius") {
        Some(r) => SingleIntervalSolver::new(&spec)?.solve(Interval::symmetric(r)?)?,
        None => optimize_radius(&spec, &optimizer(s)?)?,
    };
    write_solution(out, &spec, &sol)?;
    Ok(format!(
        "radius {:.12} energy {:.12} min density {:.3e}",
        sol.hull().1,
        sol.energy,
        sol.min_density
    ))
}

pub fn solve2(s: &Settings, out: &mut Outputs) -> Result<String> {
    let spec = pair_spec(s)?;
    let opts = TwoIntervalOptions {
        force: s.bool("force")?,
        init: s.opt_pair("init"),
        particles: s.int("particles")?,
        seed: s.int("seed")? as u64,
        ..Default::default()
    };
    let outcome = optimize_two_interval(&spec, &optimizer(s)?, &opts)?;
    out.json(
        "solution.json",
        &serde_json::json!({
            "schema": "eqmeasure.two-interval/1",
            "verdict": outcome.verdict,
            "a": outcome.a,
            "b": outcome.b,
            "interaction": outcome.energy,
            "solution": outcome.solution.as_ref().map(|sol| SolutionRecord::new(&spec, sol)),
        }),
    )?;
    if let Some(sol) = &outcome.solution {
        out.density(sol)?;
    }
    Ok(match outcome.verdict {
        SupportVerdict::TwoInterval => {
            format!("two intervals: a {:.10} b {:.10}", outcome.a, outcome.b)
        }
        SupportVerdict::SingleIntervalLikely => {
            format!(
                "inner boundary collapsed (a {:.3e}); single interval likely",
                outcome.a
            )
        }
    })
}

thread_local! {
    static CONTEXT: meval::Context<'static> = meval::Context::new();
}

fn parse_potential(text: &str) -> Result<ExternalPotential> {
    let expr: meval::Expr = text
        .parse()
        .map_err(|e| usage(format!("potential: cannot parse '{text}': {e}")))?;
    CONTEXT
        .with(|c| expr.eval_with_context((("x", 0.3), c)))
        .map_err(|e| usage(format!("potential: {e}")))?;
    Ok(ExternalPotential::new(text, move |x| {
        CONTEXT.with(|c| expr.eval_with_context((("x", x), c)).unwrap_or(f64::NAN))
    }))
}

pub fn potential(s: &Settings, out: &mut Outputs) -> Result<String> {
    let pot = parse_potential(s.text("potential")?)?;
    let spec = ProblemSpec::with_potential(s.float("alpha")?, pot, s.float("mass")?)?
        .size(s.int("n")?)
        .tikhonov(s.float("s")?)
        .lambda_policy(lambda_policy(s.text("lambda")?)?);
    spec.validate()?;
    let cfg = optimizer(s)?;
    let (a0, b0) = s.pair("init")?;
    let sol = if s.bool("symmetric")? {
        optimize_radius(&spec, &cfg)?
    } else {
        optimize_interval(&spec, &cfg, (a0, b0))?
    };
    write_solution(out, &spec, &sol)?;
    let (lo, hi) = sol.hull();
    let degree = s.int("check-degree")?;
    if degree > 0 {
        let root = root_search_measure(
            &spec,
            degree,
            Interval::new(lo, hi)?,
            RootSearchOptions::default(),
        )?;
        let diff = (root.support.a - lo).abs().max((root.support.b - hi).abs());
        out.json(
            "root_search.json",
            &serde_json::json!({
                "schema": "eqmeasure.root-search/1",
                "result": root,
                "support_difference": diff,
            }),
        )?;
    }
    Ok(format!(
        "support [{lo:.12}, {hi:.12}] energy {:.12}",
        sol.energy
    ))
}

pub fn scan_gap(s: &Settings, out: &mut Outputs) -> Result<String> {
    let (alphas, betas) = (s.range("alpha")?, s.range("beta")?);
    let defaults = GapScanDefaults {
        mass: s.float("mass")?,
        size: s.int("n")?,
        tikhonov: s.float("s")?,
        ..Default::default()
    };
    let res = gap_scan(&alphas, &betas, &defaults)?;
    out.csv_with("gap_scan.csv", |w| res.write_csv(w))?;
    let rows = res
        .boundary
        .iter()
        .enumerate()
        .flat_map(|(i, line)| line.iter().map(move |p| format!("{i},{},{}", p[0], p[1])));
    out.csv(
        "boundary.csv",
        "eqmeasure.gap-boundary/1",
        "path,alpha,beta",
        rows,
    )?;
    out.json("boundary.json", &res.boundary_json())?;
    let rows = (0..alphas.len()).flat_map(|i| {
        let a = alphas[i];
        res.row_crossings(i)
            .into_iter()
            .map(move |b| format!("{a},{b}"))
    });
    out.csv(
        "crossings.csv",
        "eqmeasure.gap-crossings/1",
        "alpha,beta",
        rows,
    )?;
    let failed = res.cells.iter().filter(|c| c.error.is_some()).count();
    let admissible = res.cells.iter().filter(|c| c.admissible).count();
    Ok(format!(
        "{} cells, {admissible} admissible, {failed} failed, {} boundary paths",
        res.cells.len(),
        res.boundary.len()
    ))
}

fn span(v: &[f64]) -> (f64, f64, usize) {
    (v[0], v[v.len() - 1], v.len())
}

pub fn contour(s: &Settings, out: &mut Outputs) -> Result<String> {
    let spec = pair_spec(s)?;
    let (a0, a1, na) = span(&s.range("a")?);
    let (b0, b1, nb) = span(&s.range("b")?);
    let c = energy_contour(&spec, (a0, a1), (b0, b1), (na, nb))?;
    out.csv_with("contour.csv", |w| c.write_csv(w))?;
    let best = c.best_admissible();
    out.json(
        "contour.json",
        &serde_json::json!({ "schema": "eqmeasure.contour/1", "best_admissible": best }),
    )?;
    Ok(match best {
        Some(b) => format!(
            "best admissible cell a {} b {} interaction {:.12}",
            b.a, b.b, b.interaction
        ),
        None => "no admissible cell on the grid".to_string(),
    })
}

pub fn simulate(s: &Settings, out: &mut Outputs) -> Result<String> {
    let (alpha, beta) = (s.float("alpha")?, s.float("beta")?);
    let (lo, hi) = s.pair("init")?;
    let cfg = SimulationConfig {
        steps: s.int("steps")?,
        dt: s.float("dt")?,
        tol: s.float("tol")?,
        seed: s.int("seed")? as u64,
        init: InitialDistribution::Uniform { lo, hi },
        ..SimulationConfig::new(alpha, beta, s.int("n")?)
    };
    cfg.validate()?;
    let state = particle_simulate(&cfg)?;
    out.csv(
        "positions.csv",
        "eqmeasure.particles/1",
        "x",
        state.positions.iter().map(|x| x.to_string()),
    )?;
    let bins = s.int("bins")?.max(1);
    let mut comparison = None;
    let mut note = None;
    if s.bool("compare")? {
        let spec = ProblemSpec::attractive_repulsive(alpha, beta, 1.0)?.size(s.int("size")?);
        let cfg = OptimizeConfig::default().allow_inadmissible();
        let single = optimize_radius(&spec, &cfg)
            .ok()
            .filter(|sol| sol.is_positive());
        // without an admissible single interval, try a symmetric pair
        let measure = single.or_else(|| {
            optimize_two_interval(
                &spec,
                &OptimizeConfig::default(),
                &TwoIntervalOptions::default(),
            )
            .ok()
            .and_then(|o| o.solution)
        });
        match measure {
            Some(sol) => comparison = Some(histogram_compare(&state, &sol, bins)?),
            None => note = Some("no admissible spectral measure found; no comparison"),
        }
    }
    match &comparison {
        Some(h) => {
            let rows =
                (0..bins).map(|k| format!("{},{},{}", h.centers[k], h.histogram[k], h.measure[k]));
            out.csv(
                "histogram.csv",
                "eqmeasure.histogram/1",
                "x,particles,measure",
                rows,
            )?;
        }
        None => {
            let (lo, hi) = (state.positions[0], state.positions[state.len() - 1]);
            let w = ((hi - lo) / bins as f64).max(f64::MIN_POSITIVE);
            let mut counts = vec![0usize; bins];
            for x in &state.positions {
                counts[(((x - lo) / w) as usize).min(bins - 1)] += 1;
            }
            let n = state.len() as f64;
            let rows = counts
                .iter()
                .enumerate()
                .map(|(k, c)| format!("{},{}", lo + (k as f64 + 0.5) * w, *c as f64 / (n * w)));
            out.csv(
                "histogram.csv",
                "eqmeasure.histogram/1",
                "x,particles",
                rows,
            )?;
        }
    }
    out.json(
        "simulation.json",
        &serde_json::json!({
            "schema": "eqmeasure.simulation/1",
            "iterations": state.iteration,
            "converged": state.converged,
            "max_displacement": state.max_displacement,
            "jitter_events": state.jitter_events,
            "hull": [state.positions[0], state.positions[state.len() - 1]],
            "ks": comparison.as_ref().map(|h| h.ks),
            "l1": comparison.as_ref().map(|h| h.l1),
            "note": note,
        }),
    )?;
    Ok(format!(
        "{} particles, {} steps, converged {}{}",
        state.len(),
        state.iteration,
        state.converged,
        comparison
            .map(|h| format!(", KS {:.3e}", h.ks))
            .unwrap_or_default()
    ))
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    tolerance: f64,
    pass: bool,
}

impl Check {
    fn at_most(name: &'static str, value: f64, tolerance: f64) -> Self {
        Self {
            name,
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }
}

pub const RADIUS_TOL: f64 = 1e-8;
pub const DENSITY_TOL: f64 = 1e-6;
pub const MASS_TOL: f64 = 1e-10;
pub const RESIDUAL_TOL: f64 = 1e-8;
pub const KS_TOL: f64 = 0.05;

pub fn validate(s: &Settings, out: &mut Outputs) -> Result<String> {
    let spec = pair_spec(s)?;
    let sol = optimize_radius(&spec, &OptimizeConfig::default())?;
    write_solution(out, &spec, &sol)?;
    let r = sol.hull().1;
    let mut checks = vec![
        Check::at_most(
            "mass",
            (sol.mass_check - spec.mass).abs() / spec.mass,
            MASS_TOL,
        ),
        Check::at_most(
            "euler-lagrange residual",
            sol.diagnostics.residual / (1.0 + sol.energy.abs()),
            RESIDUAL_TOL,
        ),
        Check::at_most("negative density", (-sol.min_density).max(0.0), 0.0),
    ];
    if let Ok(exact) = analytic_solution(spec.alpha.value(), spec.beta.unwrap().value(), spec.mass)
    {
        checks.push(Check::at_most(
            "closed-form radius",
            (r - exact.radius).abs(),
            RADIUS_TOL,
        ));
        let worst = (0..=200)
            .map(|k| {
                let x = exact.radius * (-0.9 + 1.8 * k as f64 / 200.0);
                let want = exact.density(x);
                (sol.density(x) - want).abs() / want
            })
            .fold(0.0, f64::max);
        checks.push(Check::at_most("closed-form density", worst, DENSITY_TOL));
    }
    let particles = s.int("particles")?;
    if particles > 0 && sol.is_positive() {
        let cfg = SimulationConfig {
            steps: s.int("steps")?,
            dt: s.float("dt")?,
            seed: s.int("seed")? as u64,
            init: InitialDistribution::Uniform { lo: -r, hi: r },
            ..SimulationConfig::new(spec.alpha.value(), spec.beta.unwrap().value(), particles)
        };
        let state: ParticleState = particle_simulate(&cfg)?;
        // particles carry unit total mass, the measure's shape is mass independent
        let unit = ProblemSpec {
            mass: 1.0,
            ..spec.clone()
        };
        let shape = optimize_radius(&unit, &OptimizeConfig::default())?;
        let h = histogram_compare(&state, &shape, 40)?;
        checks.push(Check::at_most("particle KS distance", h.ks, KS_TOL));
    }
    let decay = coefficient_decay_report(&sol);
    let passed = checks.iter().filter(|c| c.pass).count();
    let total = checks.len();
    out.json(
        "validation.json",
        &serde_json::json!({
            "schema": "eqmeasure.validation/1",
            "radius": r,
            "checks": checks,
            "decay": { "rate": decay.rate, "plateau": decay.plateau, "plateau_start": decay.plateau_start },
        }),
    )?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    if !failed.is_empty() {
        return Err(CliError::Check(failed.join(", ")));
    }
    Ok(format!("{passed} of {total} checks passed"))
}
