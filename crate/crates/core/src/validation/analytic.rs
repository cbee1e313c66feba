use crate::error::{invalid, Result};
use crate::operators::is_even_integer;
use crate::special::beta_fn;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AnalyticFamily {
    /// β = 2, α ∈ (2, 3): density exponent set by α.
    AlphaSide,
    /// α = 2, β ∈ (−1, 2) \ {0, 1}: density exponent set by β.
    BetaSide,
}

/// Closed-form equilibrium ρ(x) = A (R² − x²)^{(1−p)/2} on (−R, R).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSolution {
    pub family: AnalyticFamily,
    pub mass: f64,
    pub radius: f64,
    /// The power p fixing the boundary exponent.
    pub power: f64,
    pub amplitude: f64,
}

impl AnalyticSolution {
    pub fn density(&self, x: f64) -> f64 {
        let r2 = self.radius * self.radius;
        if x.abs() >= self.radius {
            return 0.0;
        }
        self.amplitude * (r2 - x * x).powf(0.5 * (1.0 - self.power))
    }

    /// The local boundary exponent (1 − p)/2 written as λ − 1/2.
    pub fn lambda(&self) -> f64 {
        1.0 - 0.5 * self.power
    }
}

fn family_for(alpha: f64, beta: f64) -> Option<(AnalyticFamily, f64)> {
    let close = |x: f64, y: f64| (x - y).abs() < 1e-12;
    if close(beta, 2.0) && alpha > 2.0 && alpha < 3.0 {
        return Some((AnalyticFamily::AlphaSide, alpha));
    }
    if close(alpha, 2.0) && beta > -1.0 && beta < 2.0 && !close(beta, 0.0) && !close(beta, 1.0) {
        return Some((AnalyticFamily::BetaSide, beta));
    }
    None
}

/// Closed-form solution for the families where one power is 2.
pub fn analytic_solution(alpha: f64, beta: f64, mass: f64) -> Result<AnalyticSolution> {
    if !(mass > 0.0) {
        return Err(invalid("mass must be positive"));
    }
    let (family, p) = family_for(alpha, beta)
        .filter(|_| is_even_integer(alpha) || is_even_integer(beta))
        .ok_or_else(|| {
            invalid(format!(
                "no closed form for (alpha, beta) = ({alpha}, {beta})"
            ))
        })?;
    let c = -(0.5 * p * PI).cos() / (PI * (p - 1.0));
    let base = c * beta_fn(0.5, 0.5 * (3.0 - p))?;
    if !(base > 0.0) {
        return Err(invalid(format!(
            "closed form is not admissible for power {p}"
        )));
    }
    let radius = base.powf(1.0 / (p - 2.0));
    Ok(AnalyticSolution {
        family,
        mass,
        radius,
        power: p,
        amplitude: mass * c,
    })
}
