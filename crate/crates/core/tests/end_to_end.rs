use eqmeasure::solver::{
    solve_two_interval, ExternalPotential, ProblemSpec, SingleIntervalSolver, SolutionRecord,
};
use eqmeasure::support::{
    energy_curve, gap_scan, optimize_interval, optimize_radius, optimize_two_interval,
    GapScanDefaults, OptimizeConfig, OptimizerMethod, TwoIntervalOptions,
};
use eqmeasure::ultraspherical::Interval;
use eqmeasure::validation::{
    analytic_solution, coefficient_decay_report, histogram_compare, particle_simulate,
    particle_step, root_search_measure, InitialDistribution, MeasureCdf, ParticleState,
    RootSearchOptions, SimulationConfig,
};
use eqmeasure::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn quartic_sine() -> ExternalPotential {
    ExternalPotential::new("x^4 - sin x", |x: f64| x.powi(4) - x.sin())
}

#[test]
fn radius_matches_closed_forms_for_each_method() {
    for (a, b, m) in [(2.0, 1.5, 1.0), (7.0 / 3.0, 2.0, 3.0), (2.0, -0.2, 1.0)] {
        let exact = analytic_solution(a, b, m).unwrap().radius;
        let spec = ProblemSpec::attractive_repulsive(a, b, m).unwrap().size(40);
        for method in [
            OptimizerMethod::NewtonLinesearch,
            OptimizerMethod::GoldenSection,
            OptimizerMethod::NelderMead,
        ] {
            let cfg = OptimizeConfig {
                method,
                ..Default::default()
            };
            let sol = optimize_radius(&spec, &cfg).unwrap();
            // without the Newton polish the flat minimum limits accuracy to ~sqrt(eps)
            let tol = if method == OptimizerMethod::NewtonLinesearch {
                1e-8
            } else {
                1e-6
            };
            assert!(
                (sol.hull().1 - exact).abs() < tol,
                "({a},{b}) {method:?}: {} vs {exact}",
                sol.hull().1
            );
            assert!(sol.is_positive());
        }
    }
}

#[test]
fn energy_curve_is_minimal_near_the_optimum() {
    let spec = ProblemSpec::attractive_repulsive(2.0, 1.5, 1.0)
        .unwrap()
        .size(30);
    let r = analytic_solution(2.0, 1.5, 1.0).unwrap().radius;
    // the admissible window around R is narrow, the minimum sits inside it
    let samples = energy_curve(&spec, &[0.998 * r, r, 1.002 * r, 1.1 * r]).unwrap();
    assert!(samples[1].interaction < samples[0].interaction);
    assert!(samples[1].interaction < samples[2].interaction);
    assert!(samples[..3].iter().all(|s| s.admissible));
    assert!(!samples[3].admissible);
}

#[test]
fn symmetric_potential_three_ways() {
    let spec = ProblemSpec::with_potential(0.5, ExternalPotential::new("x^2", |x| x * x), 1.0)
        .unwrap()
        .size(40);
    let radial = optimize_radius(&spec, &OptimizeConfig::default()).unwrap();
    let free = optimize_interval(&spec, &OptimizeConfig::default(), (-0.5, 1.0)).unwrap();
    let root = root_search_measure(
        &spec,
        12,
        Interval::new(-0.7, 0.7).unwrap(),
        RootSearchOptions::default(),
    )
    .unwrap();
    let r = radial.hull().1;
    assert!(
        (root.support.b - r).abs() < 1e-10,
        "{} vs {r}",
        root.support.b
    );
    assert!((root.support.a + r).abs() < 1e-10);
    let (lo, hi) = free.hull();
    assert!(
        (lo + r).abs() < 1e-6 && (hi - r).abs() < 1e-6,
        "{lo} {hi} vs {r}"
    );
    // the fields agree up to the additive constant E
    assert!((radial.energy - root.energy).abs() < 1e-8);
}

#[test]
fn asymmetric_potential_matches_root_search() {
    let spec = ProblemSpec::with_potential(-2.0 / 3.0, quartic_sine(), 5.0 / 3.0)
        .unwrap()
        .size(40);
    let sol = optimize_interval(&spec, &OptimizeConfig::default(), (-1.0, 1.0)).unwrap();
    let (lo, hi) = sol.hull();
    assert!(lo + hi > 0.1, "support should lean right: ({lo}, {hi})");
    let root = root_search_measure(
        &spec,
        12,
        Interval::new(lo, hi).unwrap(),
        RootSearchOptions::default(),
    )
    .unwrap();
    assert!((root.support.a - lo).abs() < 1e-6 && (root.support.b - hi).abs() < 1e-6);
    let w = hi - lo;
    let worst = (0..=200)
        .map(|k| {
            let x = lo + w * (0.05 + 0.9 * k as f64 / 200.0);
            (root.density(x) - sol.density(x)).abs()
        })
        .fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn root_search_rejects_bad_input() {
    let pot =
        ProblemSpec::with_potential(0.5, ExternalPotential::new("x^2", |x| x * x), 1.0).unwrap();
    let init = Interval::symmetric(0.7).unwrap();
    assert!(matches!(
        root_search_measure(&pot, 1, init, RootSearchOptions::default()),
        Err(Error::InvalidParameter(_))
    ));
    let pair = ProblemSpec::attractive_repulsive(2.0, 1.5, 1.0).unwrap();
    assert!(root_search_measure(&pair, 8, init, RootSearchOptions::default()).is_err());
}

#[test]
fn closed_form_coefficients_collapse() {
    let spec = ProblemSpec::attractive_repulsive(2.0, 1.5, 1.0)
        .unwrap()
        .size(30);
    let r = analytic_solution(2.0, 1.5, 1.0).unwrap().radius;
    let sol = SingleIntervalSolver::new(&spec)
        .unwrap()
        .solve(Interval::symmetric(r).unwrap())
        .unwrap();
    let d = coefficient_decay_report(&sol);
    let c0 = d.magnitudes[0];
    assert!(
        d.magnitudes[1..].iter().all(|m| *m < 1e-12 * c0),
        "{:?}",
        &d.magnitudes[..6]
    );
    assert!(d.plateau_start <= 2);
}

#[test]
fn higher_alpha_decays_more_slowly() {
    let tail = |a: f64| {
        let spec = ProblemSpec::attractive_repulsive(a, 0.881, 1.0)
            .unwrap()
            .size(150);
        let d =
            coefficient_decay_report(&optimize_radius(&spec, &OptimizeConfig::default()).unwrap());
        let m = &d.magnitudes;
        m[130..].iter().copied().fold(0.0, f64::max) / m[0].max(m[1])
    };
    let (low, high) = (tail(0.912), tail(1.772));
    assert!(high > 10.0 * low, "{low:.2e} vs {high:.2e}");
}

#[test]
fn sampled_measure_is_close_to_itself() {
    let spec = ProblemSpec::attractive_repulsive(2.0, 1.5, 1.0)
        .unwrap()
        .size(30);
    let sol = optimize_radius(&spec, &OptimizeConfig::default()).unwrap();
    let cdf = MeasureCdf::new(&sol).unwrap();
    assert!((cdf.mass - 1.0).abs() < 1e-10);
    assert!(cdf.mean().abs() < 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let draws = ParticleState::from_positions(cdf.sample(100_000, &mut rng));
    let h = histogram_compare(&draws, &sol, 50).unwrap();
    assert!(h.ks < 0.01, "{}", h.ks);
    let squeezed =
        ParticleState::from_positions(draws.positions.iter().map(|x| 0.01 * x).collect());
    assert!(histogram_compare(&squeezed, &sol, 50).unwrap().ks > 0.4);
    assert!(histogram_compare(&draws, &sol, 0).is_err());
    assert!(histogram_compare(&ParticleState::from_positions(vec![]), &sol, 10).is_err());
}

#[test]
fn particles_settle_on_the_closed_form() {
    let spec = ProblemSpec::attractive_repulsive(2.0, 1.5, 1.0)
        .unwrap()
        .size(30);
    let sol = optimize_radius(&spec, &OptimizeConfig::default()).unwrap();
    let mut cfg = SimulationConfig::new(2.0, 1.5, 3000);
    cfg.steps = 40;
    cfg.dt = 1.0;
    let st = particle_simulate(&cfg).unwrap();
    assert_eq!(st.len(), 3000);
    let h = histogram_compare(&st, &sol, 40).unwrap();
    assert!(h.ks <= 0.05, "{}", h.ks);
}

#[test]
fn settled_swarm_is_a_fixed_point() {
    let mut cfg = SimulationConfig::new(3.0, 1.5, 100);
    cfg.tol = 1e-12;
    let st = particle_simulate(&cfg).unwrap();
    assert!(st.converged);
    let mut x = st.positions.clone();
    let moved = particle_step(3.0, 1.5, &mut x, cfg.dt, &mut Vec::new());
    assert!(moved < 1e-9, "{moved}");
}

#[test]
fn singular_repulsion_keeps_particles_apart() {
    let mut cfg = SimulationConfig::new(2.0, -0.5, 50);
    cfg.init = InitialDistribution::Explicit {
        positions: vec![0.0; 50],
    };
    cfg.dt = 0.01;
    cfg.steps = 2000;
    let st = particle_simulate(&cfg).unwrap();
    assert!(st.jitter_events >= 1);
    assert!(st.positions.windows(2).all(|w| w[1] > w[0]));
    assert!(st.positions.iter().all(|v| v.is_finite()));
}

#[test]
fn two_interval_needs_a_gap() {
    let admissible = ProblemSpec::attractive_repulsive(3.0, 1.2, 1.0)
        .unwrap()
        .size(40);
    assert!(optimize_two_interval(
        &admissible,
        &OptimizeConfig::default(),
        &TwoIntervalOptions::default()
    )
    .is_err());
    let spec = ProblemSpec::attractive_repulsive(4.0, 1.61, 1.0)
        .unwrap()
        .size(40);
    assert!(solve_two_interval(&spec, 0.5, 0.4, 40).is_err());
    let sol = solve_two_interval(&spec, 0.33665, 0.57236, 40).unwrap();
    assert!(
        (sol.measure.integral() - 0.5).abs() < 1e-12,
        "each half carries half the mass"
    );
    assert!((sol.density(0.45) - sol.density(-0.45)).abs() < 1e-14);
    assert_eq!(sol.density(0.1), 0.0);
}

#[test]
fn gap_scan_reports_cells_and_rejects_bad_lattices() {
    let res = gap_scan(&[4.0], &[1.4, 1.6], &GapScanDefaults::default()).unwrap();
    assert_eq!(res.cells.len(), 2);
    assert!(res.cell(0, 0).admissible && !res.cell(0, 1).admissible);
    assert_eq!(res.row_crossings(0).len(), 1);
    let mut csv = Vec::new();
    res.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text
        .starts_with("# eqmeasure.gapscan/1\nalpha,beta,radius,energy,min_density,admissible\n"));
    assert!(gap_scan(&[1.0], &[1.5], &GapScanDefaults::default()).is_err());
    assert!(gap_scan(&[], &[1.5], &GapScanDefaults::default()).is_err());
}

#[test]
fn invalid_problems_are_rejected() {
    assert!(ProblemSpec::attractive_repulsive(1.5, 2.0, 1.0).is_err());
    assert!(ProblemSpec::attractive_repulsive(2.0, 1.5, 0.0).is_err());
    assert!(ProblemSpec::attractive_repulsive(2.0, 0.0, 1.0).is_err());
    assert!(analytic_solution(3.5, 1.6, 1.0).is_err());
    let spec = ProblemSpec::attractive_repulsive(2.0, 1.5, 1.0)
        .unwrap()
        .size(1);
    assert!(matches!(spec.validate(), Err(Error::Dimension(_))));
}

#[test]
fn solution_record_serializes() {
    let spec = ProblemSpec::attractive_repulsive(2.0, 1.5, 1.0)
        .unwrap()
        .size(20);
    let sol = optimize_radius(&spec, &OptimizeConfig::default()).unwrap();
    let json = serde_json::to_value(SolutionRecord::new(&spec, &sol)).unwrap();
    assert_eq!(json["schema"], "eqmeasure.solution/1");
}
