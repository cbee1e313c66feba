//! Values frozen from 40-digit mpmath evaluations (direct quadrature for the
//! kernel integrals, hypergeometric series for the special functions).

use eqmeasure::operators::{
    far_field_values, popov_diagonal, KernelPower, OperatorOptions, PowerLawOperator,
};
use eqmeasure::special::{digamma, gamma, gauss_2f1};
use eqmeasure::ultraspherical::{eval_poly, synthesis, BasisParam};
use eqmeasure::validation::analytic_solution;

fn close(got: f64, want: f64, rel: f64) -> bool {
    (got - want).abs() <= rel * want.abs().max(1.0)
}

#[test]
fn gamma_and_digamma() {
    for (x, want) in [
        (0.5, 1.772453850905516),
        (3.7, 4.170651783796604),
        (-1.3, 3.328347006788609),
        (0.01, 99.4325851191506),
        (12.25, 73711509.04676995),
    ] {
        assert!(close(gamma(x), want, 1e-13), "gamma({x}) = {}", gamma(x));
    }
    for (x, want) in [
        (0.25, -4.2274535333762655),
        (2.5, 0.7031566406452432),
        (-0.7, -2.073952793628704),
    ] {
        assert!(
            close(digamma(x), want, 1e-12),
            "digamma({x}) = {}",
            digamma(x)
        );
    }
}

#[test]
fn hypergeometric_2f1() {
    let cases = [
        ((0.3, -1.2, 0.5, 0.7), 0.5344594902891379),
        ((1.5, 0.25, 2.0, -3.0), 0.7531407084864603),
        ((0.5, 0.5, 1.0, 0.99), 2.3527158167797424),
        ((-0.805, -1.0, 0.5, 0.36), 1.5796),
        ((0.2, 0.3, 0.5, 0.999), 1.8771911823323644),
        ((1.0, 1.0, 2.0, 0.9), 2.5584278811044956),
        ((-0.25, 0.4, 1.5, -0.5), 1.0303927437437892),
    ];
    for ((a, b, c, z), want) in cases {
        let got = gauss_2f1(a, b, c, z).unwrap();
        assert!(
            close(got, want, 1e-11),
            "2F1({a},{b};{c};{z}) = {got}, want {want}"
        );
    }
}

#[test]
fn gegenbauer_values() {
    for ((n, l, x), want) in [
        ((5, 0.3, 0.4), 0.14096189952),
        ((12, -0.25, -0.8), 0.002304146704562483),
        ((30, 1.7, 0.95), 21.547664259772763),
        ((3, 2.5, 1.0), 35.0),
    ] {
        let got = eval_poly(n, BasisParam::new(l).unwrap(), x);
        assert!(close(got, want, 1e-12), "C_{n}^({l})({x}) = {got}");
    }
}

fn column_value(alpha: f64, lambda: f64, n: usize, x: f64) -> f64 {
    let basis = BasisParam::new(lambda).unwrap();
    let opts = OperatorOptions {
        bandwidth: Some(512),
        ..Default::default()
    };
    let op =
        PowerLawOperator::build(KernelPower::new(alpha).unwrap(), basis, n + 8, &opts).unwrap();
    let col: Vec<f64> = (0..op.matrix.rows()).map(|m| op.matrix.get(m, n)).collect();
    synthesis(basis, &col, x)
}

#[test]
fn operator_columns_match_quadrature() {
    let cases = [
        ((1.61, 0.195, 0, 0.3), 1.3408632338426425),
        ((1.61, 0.195, 1, 0.3), -0.21803060528678397),
        ((2.5, 0.75, 3, -0.6), 0.06642761673227726),
        ((3.9, 0.05, 1, 0.9), -0.7349230942224902),
        ((0.5, -0.25, 4, 0.2), 0.011881674734115905),
        ((1.7, 0.1, 2, -0.35), 0.06599275365562482),
        ((-0.3, 0.15, 1, 0.5), 0.15866513383874312),
    ];
    for ((alpha, lambda, n, x), want) in cases {
        let got = column_value(alpha, lambda, n, x);
        assert!(
            close(got, want, 1e-9),
            "Q^{alpha}[w C_{n}^({lambda})]({x}) = {got}, want {want}"
        );
    }
}

#[test]
fn far_field_seeds() {
    let (n0, _) = far_field_values(2.5, 0.75, 1.7).unwrap();
    assert!(close(n0, 7.8028113296865795, 1e-10), "{n0}");
    let (_, n1) = far_field_values(1.61, 0.195, -2.2).unwrap();
    assert!(close(n1, 1.0637461986003918, 1e-10), "{n1}");
}

#[test]
fn popov_entries() {
    let alpha = KernelPower::new(0.5).unwrap();
    for (n, want) in [
        (0, 4.442882938158366),
        (1, -2.221441469079183),
        (2, -0.5553603672697958),
        (7, -0.07158942234337211),
        (63, -0.0025214360631296193),
    ] {
        let got = popov_diagonal(alpha, n).unwrap();
        assert!(close(got, want, 1e-13), "d_{n} = {got}");
    }
}

#[test]
fn analytic_radii() {
    for ((a, b, m), want) in [
        ((2.0, 1.5, 1.0), 0.8593982272525466),
        ((2.0, -0.2, 1.0), 1.5491103763255956),
        ((7.0 / 3.0, 2.0, 3.0), 0.6578139699851135),
    ] {
        let got = analytic_solution(a, b, m).unwrap().radius;
        assert!(close(got, want, 1e-13), "R({a},{b}) = {got}");
    }
}
