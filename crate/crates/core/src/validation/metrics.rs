use super::ParticleState;
use crate::error::{invalid, Error, Result};
use crate::quadrature::tanh_sinh;
use crate::solver::EquilibriumSolution;
use crate::ultraspherical::{synthesis, SupportSpec};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const CDF_SEGMENTS: usize = 512;

/// Tabulated cumulative distribution of a computed measure, normalized to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureCdf {
    xs: Vec<f64>,
    cdf: Vec<f64>,
    pub mass: f64,
}

impl MeasureCdf {
    /// Integrates the density segment by segment on a cosine-clustered grid.
    pub fn new(sol: &EquilibriumSolution) -> Result<Self> {
        let m = &sol.measure;
        let expo = m.basis.lambda() - 0.5;
        let nodes: Vec<f64> = (0..=CDF_SEGMENTS)
            .map(|i| -(PI * i as f64 / CDF_SEGMENTS as f64).cos())
            .collect();
        let mut local = vec![0.0; nodes.len()];
        for i in 1..nodes.len() {
            let (lo, hi) = (nodes[i - 1], nodes[i]);
            let (lo1, hi1) = (
                if i == 1 { 0.0 } else { 1.0 + lo },
                if i == CDF_SEGMENTS { 0.0 } else { 1.0 - hi },
            );
            let seg = tanh_sinh(
                |y, dl, dr| synthesis(m.basis, &m.coeffs, y) * ((lo1 + dl) * (hi1 + dr)).powf(expo),
                lo,
                hi,
                1e-13,
            )?;
            local[i] = local[i - 1] + seg;
        }
        let r = m.support.half_width();
        let piece = r * local[CDF_SEGMENTS];
        let (xs, cdf) = match sol.support {
            SupportSpec::Interval { .. } => (
                nodes
                    .iter()
                    .map(|&t| m.support.to_global(t))
                    .collect::<Vec<_>>(),
                local
                    .iter()
                    .map(|v| v / local[CDF_SEGMENTS])
                    .collect::<Vec<_>>(),
            ),
            SupportSpec::SymmetricPair { .. } => {
                let mut xs = Vec::with_capacity(2 * nodes.len());
                let mut cdf = Vec::with_capacity(2 * nodes.len());
                let total = 2.0 * local[CDF_SEGMENTS];
                for (t, f) in nodes.iter().zip(&local).rev() {
                    xs.push(-m.support.to_global(*t));
                    cdf.push((local[CDF_SEGMENTS] - f) / total);
                }
                for (t, f) in nodes.iter().zip(&local) {
                    xs.push(m.support.to_global(*t));
                    cdf.push((local[CDF_SEGMENTS] + f) / total);
                }
                (xs, cdf)
            }
        };
        let pieces = if matches!(sol.support, SupportSpec::SymmetricPair { .. }) {
            2.0
        } else {
            1.0
        };
        if !(piece.is_finite() && piece > 0.0) {
            return Err(Error::Degenerate("measure has no positive mass".into()));
        }
        Ok(Self {
            xs,
            cdf,
            mass: pieces * piece,
        })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return 0.0;
        }
        if x >= self.xs[n - 1] {
            return 1.0;
        }
        let i = self.xs.partition_point(|v| *v <= x);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let w = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
        self.cdf[i - 1] + w * (self.cdf[i] - self.cdf[i - 1])
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let i = self
            .cdf
            .partition_point(|v| *v < u)
            .clamp(1, self.cdf.len() - 1);
        let (f0, f1) = (self.cdf[i - 1], self.cdf[i]);
        let w = if f1 > f0 { (u - f0) / (f1 - f0) } else { 0.0 };
        self.xs[i - 1] + w * (self.xs[i] - self.xs[i - 1])
    }

    pub fn mean(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.cdf.windows(2))
            .map(|(x, f)| 0.5 * (x[0] + x[1]) * (f[1] - f[0]))
            .sum()
    }

    /// Inverse-CDF samples.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.quantile(rng.random::<f64>())).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramComparison {
    /// Largest gap between empirical and measure CDFs.
    pub ks: f64,
    /// Σ|histogram mass − measure mass| over bins, both normalized to 1.
    pub l1: f64,
    pub centers: Vec<f64>,
    /// Bin densities of the particles and of the measure scaled to the same mass.
    pub histogram: Vec<f64>,
    pub measure: Vec<f64>,
}

/// Compares a particle swarm with a computed measure.
///
/// The swarm is shifted so its centre of mass matches the mean of the
/// measure, since the interaction is translation invariant.
pub fn histogram_compare(
    state: &ParticleState,
    sol: &EquilibriumSolution,
    bins: usize,
) -> Result<HistogramComparison> {
    if state.is_empty() {
        return Err(invalid("particle state is empty"));
    }
    if bins == 0 {
        return Err(invalid("histogram needs at least one bin"));
    }
    if !sol.is_positive() {
        return Err(invalid(format!(
            "measure is not positive (min density {:.3e})",
            sol.min_density
        )));
    }
    let cdf = MeasureCdf::new(sol)?;
    let shift = cdf.mean() - state.center_of_mass();
    let mut x: Vec<f64> = state.positions.iter().map(|v| v + shift).collect();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    let ks = x
        .iter()
        .enumerate()
        .map(|(i, &xi)| {
            let f = cdf.eval(xi);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max);
    let (hull_lo, hull_hi) = sol.hull();
    let lo = hull_lo.min(x[0]);
    let hi = hull_hi.max(x[x.len() - 1]);
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0.0; bins];
    for &xi in &x {
        let k = (((xi - lo) / width) as usize).min(bins - 1);
        counts[k] += 1.0;
    }
    let mut l1 = 0.0;
    let mut histogram = Vec::with_capacity(bins);
    let mut measure = Vec::with_capacity(bins);
    let mut centers = Vec::with_capacity(bins);
    for (k, c) in counts.iter().enumerate() {
        let e0 = lo + k as f64 * width;
        let mk = cdf.eval(e0 + width) - cdf.eval(e0);
        let hk = c / n;
        l1 += (hk - mk).abs();
        centers.push(e0 + 0.5 * width);
        histogram.push(hk / width);
        measure.push(mk / width);
    }
    Ok(HistogramComparison {
        ks,
        l1,
        centers,
        histogram,
        measure,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub magnitudes: Vec<f64>,
    /// Fitted ratio r in |c_n| ≈ C rⁿ over the decaying part.
    pub rate: f64,
    /// Typical magnitude of the trailing coefficients.
    pub plateau: f64,
    /// First index at which the sequence reaches the plateau.
    pub plateau_start: usize,
}

/// Geometric decay fit of the solution coefficients.
///
/// The plateau is the median of the trailing eighth of the magnitudes. The
/// sequence reaches it at the first index after which every magnitude stays
/// within a factor 10 of it; the rate is a least-squares fit of log|c_n| over
/// the earlier indices, skipping entries already at the plateau (the zero odd
/// coefficients of symmetric measures).
pub fn coefficient_decay_report(sol: &EquilibriumSolution) -> DecayReport {
    let magnitudes: Vec<f64> = sol.measure.coeffs.iter().map(|c| c.abs()).collect();
    let n = magnitudes.len();
    let tail = (n / 8).max(4).min(n);
    let mut trailing: Vec<f64> = magnitudes[n - tail..].to_vec();
    trailing.sort_by(f64::total_cmp);
    let plateau = trailing
        .get(tail / 2)
        .copied()
        .unwrap_or(0.0)
        .max(f64::MIN_POSITIVE);
    let level = 10.0 * plateau;
    let plateau_start = magnitudes
        .iter()
        .rposition(|&m| m > level)
        .map_or(0, |i| i + 1);
    let pts: Vec<(f64, f64)> = magnitudes[..plateau_start]
        .iter()
        .enumerate()
        .filter(|(_, m)| **m > level)
        .map(|(i, m)| (i as f64, m.ln()))
        .collect();
    let rate = if pts.len() >= 2 {
        let k = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (mx, my) = (sx / k, sy / k);
        let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
            (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
        });
        (sxy / sxx).exp()
    } else {
        0.0
    };
    DecayReport {
        magnitudes,
        rate,
        plateau,
        plateau_start,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{ProblemSpec, SingleIntervalSolver};
    use crate::ultraspherical::Interval;
    use crate::validation::analytic_solution;
    use rand::SeedableRng;

    fn semicircle_like() -> EquilibriumSolution {
        let r = analytic_solution(2.0, 1.5, 1.0).unwrap().radius;
        let spec = ProblemSpec::attractive_repulsive(2.0, 1.5, 1.0)
            .unwrap()
            .size(12);
        SingleIntervalSolver::new(&spec)
            .unwrap()
            .solve(Interval::symmetric(r).unwrap())
            .unwrap()
    }

    #[test]
    fn cdf_is_symmetric_and_monotone() {
        let cdf = MeasureCdf::new(&semicircle_like()).unwrap();
        assert!((cdf.eval(0.0) - 0.5).abs() < 1e-12);
        assert_eq!(cdf.eval(-5.0), 0.0);
        assert_eq!(cdf.eval(5.0), 1.0);
        assert!(cdf.cdf.windows(2).all(|w| w[1] >= w[0]));
        for u in [0.1, 0.37, 0.9] {
            assert!((cdf.eval(cdf.quantile(u)) - u).abs() < 1e-12);
        }
    }

    #[test]
    fn quantile_grid_has_zero_ks() {
        let sol = semicircle_like();
        let cdf = MeasureCdf::new(&sol).unwrap();
        let n = 2000;
        let x = (0..n)
            .map(|i| cdf.quantile((i as f64 + 0.5) / n as f64))
            .collect();
        let h = histogram_compare(&ParticleState::from_positions(x), &sol, 20).unwrap();
        assert!(h.ks <= 0.5 / n as f64 + 1e-9, "{}", h.ks);
        assert!(h.l1 < 0.01);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        assert_eq!(cdf.sample(7, &mut rng).len(), 7);
    }

    #[test]
    fn decay_of_a_geometric_sequence() {
        let mut sol = semicircle_like();
        sol.measure.coeffs = (0..40)
            .map(|k| if k < 30 { 0.5f64.powi(k) } else { 1e-16 })
            .collect();
        let d = coefficient_decay_report(&sol);
        assert!((d.rate - 0.5).abs() < 1e-12, "{}", d.rate);
        assert_eq!(d.plateau, 1e-16);
        assert_eq!(d.plateau_start, 30);
    }
}
