use crate::error::{invalid, Error, Result};
use crate::operators::is_even_integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Separation below which two particles count as coincident.
pub const MIN_SEPARATION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialDistribution {
    Uniform { lo: f64, hi: f64 },
    Explicit { positions: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub alpha: f64,
    pub beta: f64,
    pub particles: usize,
    pub steps: usize,
    pub dt: f64,
    pub init: InitialDistribution,
    pub seed: u64,
    /// Stop once the largest displacement in a step falls below this.
    pub tol: f64,
}

impl SimulationConfig {
    pub fn new(alpha: f64, beta: f64, particles: usize) -> Self {
        Self {
            alpha,
            beta,
            particles,
            steps: 20_000,
            dt: 0.2,
            init: InitialDistribution::Uniform { lo: -1.0, hi: 1.0 },
            seed: 0,
            tol: 1e-10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > self.beta) {
            return Err(invalid(format!(
                "need alpha > beta, got ({}, {})",
                self.alpha, self.beta
            )));
        }
        if !(self.beta > -1.0) || !self.alpha.is_finite() {
            return Err(invalid("powers must be finite with beta > -1"));
        }
        if self.particles < 2 {
            return Err(invalid("particle simulation needs at least two particles"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(invalid(format!(
                "time step must be positive, got {}",
                self.dt
            )));
        }
        if let InitialDistribution::Explicit { positions } = &self.init {
            if positions.len() != self.particles {
                return Err(invalid(
                    "explicit initial positions do not match the particle count",
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleState {
    /// Sorted positions.
    pub positions: Vec<f64>,
    pub step: f64,
    pub iteration: usize,
    pub converged: bool,
    pub max_displacement: f64,
    /// Steps in which coincident particles had to be separated.
    pub jitter_events: usize,
}

impl ParticleState {
    /// A settled state from given positions, for comparing samples.
    pub fn from_positions(mut positions: Vec<f64>) -> Self {
        positions.sort_by(f64::total_cmp);
        Self {
            positions,
            step: 0.0,
            iteration: 0,
            converged: true,
            max_displacement: 0.0,
            jitter_events: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn center_of_mass(&self) -> f64 {
        self.positions.iter().sum::<f64>() / self.positions.len() as f64
    }
}

/// Σ_j sign(x_i − x_j)|x_i − x_j|^{p−1} for every i over sorted positions.
fn power_sums(x: &[f64], p: f64, out: &mut [f64]) {
    let n = x.len();
    out.iter_mut().for_each(|v| *v = 0.0);
    if is_even_integer(p) && p > 0.0 {
        // odd integer exponent: expand (x_i − x_j)^k in moments of the cloud
        let k = p.round() as usize - 1;
        let c = x.iter().sum::<f64>() / n as f64;
        let moments: Vec<f64> = (0..=k)
            .map(|m| x.iter().map(|v| (v - c).powi(m as i32)).sum())
            .collect();
        let mut binom = vec![1.0; k + 1];
        for m in 1..=k {
            binom[m] = binom[m - 1] * (k + 1 - m) as f64 / m as f64;
        }
        for (o, &xi) in out.iter_mut().zip(x) {
            let u = xi - c;
            let mut s = 0.0;
            for m in 0..=k {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                s += binom[m] * u.powi((k - m) as i32) * sign * moments[m];
            }
            *o = s;
        }
        return;
    }
    let e = p - 1.0;
    for i in 0..n {
        let xi = x[i];
        let mut acc = 0.0;
        for j in i + 1..n {
            let d = x[j] - xi;
            let f = if e == 0.0 { 1.0 } else { d.powf(e) };
            acc -= f;
            out[j] += f;
        }
        out[i] += acc;
    }
}

/// One explicit Euler step of the overdamped flow; returns the largest displacement.
pub fn particle_step(
    alpha: f64,
    beta: f64,
    positions: &mut [f64],
    dt: f64,
    scratch: &mut Vec<f64>,
) -> f64 {
    let n = positions.len();
    positions.sort_by(f64::total_cmp);
    scratch.resize(2 * n, 0.0);
    let (att, rep) = scratch.split_at_mut(n);
    power_sums(positions, alpha, att);
    power_sums(positions, beta, rep);
    let scale = dt / n as f64;
    let mut max_disp: f64 = 0.0;
    for i in 0..n {
        let d = -scale * (att[i] - rep[i]);
        positions[i] += d;
        max_disp = max_disp.max(d.abs());
    }
    max_disp
}

fn separate(positions: &mut [f64]) -> bool {
    positions.sort_by(f64::total_cmp);
    let mut moved = false;
    for i in 1..positions.len() {
        if positions[i] - positions[i - 1] < MIN_SEPARATION {
            positions[i] = positions[i - 1] + MIN_SEPARATION;
            moved = true;
        }
    }
    moved
}

/// Overdamped particle dynamics x_i ← x_i − dt·(1/N)Σ_j K′(x_i − x_j).
///
/// Positions are kept sorted. With β < 1 the repulsion is singular, so
/// coincident particles are pushed apart to `MIN_SEPARATION` and counted.
pub fn particle_simulate(config: &SimulationConfig) -> Result<ParticleState> {
    config.validate()?;
    let mut positions = match &config.init {
        InitialDistribution::Uniform { lo, hi } => {
            if !(hi > lo) {
                return Err(invalid("uniform initial distribution needs lo < hi"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            (0..config.particles)
                .map(|_| rng.random_range(*lo..*hi))
                .collect::<Vec<_>>()
        }
        InitialDistribution::Explicit { positions } => positions.clone(),
    };
    if positions.iter().any(|v| !v.is_finite()) {
        return Err(invalid("initial positions must be finite"));
    }
    let singular = config.beta < 1.0;
    let mut jitter_events = usize::from(separate(&mut positions) && singular);
    let mut scratch = Vec::new();
    let mut max_disp = f64::INFINITY;
    for it in 0..config.steps {
        max_disp = particle_step(
            config.alpha,
            config.beta,
            &mut positions,
            config.dt,
            &mut scratch,
        );
        if positions.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "particle positions diverged at step {it}"
            )));
        }
        if positions.windows(2).any(|w| w[1] - w[0] < MIN_SEPARATION) {
            separate(&mut positions);
            jitter_events += 1;
        }
        if max_disp < config.tol {
            return Ok(ParticleState {
                positions,
                step: config.dt,
                iteration: it + 1,
                converged: true,
                max_displacement: max_disp,
                jitter_events,
            });
        }
    }
    Ok(ParticleState {
        positions,
        step: config.dt,
        iteration: config.steps,
        converged: false,
        max_displacement: max_disp,
        jitter_events,
    })
}

/// Support estimate read off a settled swarm, relative to its centre of mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwarmSupport {
    pub inner: f64,
    pub outer: f64,
    /// Distance between the two innermost particles on the same side.
    pub inner_spacing: f64,
}

impl SwarmSupport {
    /// True when the central gap is wider than the local particle spacing.
    pub fn has_gap(&self) -> bool {
        2.0 * self.inner > 3.0 * self.inner_spacing
    }
}

fn swarm_support(s: &ParticleState) -> SwarmSupport {
    let c = s.center_of_mass();
    let mut d: Vec<f64> = s.positions.iter().map(|v| v - c).collect();
    d.sort_by(f64::total_cmp);
    let split = d.partition_point(|v| *v < 0.0);
    let side = |v: &[f64]| -> (f64, f64) {
        match v {
            [x, y, ..] => (x.abs(), (y - x).abs()),
            [x] => (x.abs(), f64::INFINITY),
            [] => (f64::INFINITY, f64::INFINITY),
        }
    };
    let left: Vec<f64> = d[..split].iter().rev().copied().collect();
    let (l_in, l_sp) = side(&left);
    let (r_in, r_sp) = side(&d[split..]);
    SwarmSupport {
        inner: l_in.min(r_in),
        outer: d
            .first()
            .map_or(0.0, |v| v.abs())
            .max(d.last().map_or(0.0, |v| v.abs())),
        inner_spacing: l_sp.min(r_sp),
    }
}

/// Support of a small particle swarm, used as a starting guess for support
/// optimizers. The time step is halved until the flow stays bounded.
pub fn particle_support_guess(
    alpha: f64,
    beta: f64,
    particles: usize,
    seed: u64,
) -> Result<SwarmSupport> {
    let mut config = SimulationConfig::new(alpha, beta, particles);
    config.seed = seed;
    config.steps = 4000;
    config.tol = 1e-7;
    let mut last = f64::NAN;
    for _ in 0..6 {
        match particle_simulate(&config) {
            Ok(s) if s.max_displacement < 1e-4 => return Ok(swarm_support(&s)),
            Ok(s) => last = s.max_displacement,
            Err(e @ Error::InvalidParameter(_)) => return Err(e),
            Err(_) => last = f64::NAN,
        }
        config.dt *= 0.5;
    }
    Err(Error::Optimization(format!(
        "particle swarm did not settle (last displacement {last:.3e})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_balances_at_unit_distance() {
        let mut cfg = SimulationConfig::new(3.0, 0.5, 2);
        cfg.init = InitialDistribution::Explicit {
            positions: vec![-0.1, 0.3],
        };
        cfg.dt = 0.5;
        let s = particle_simulate(&cfg).unwrap();
        assert!(s.converged);
        assert!((s.positions[1] - s.positions[0] - 1.0).abs() < 1e-9);
        assert!((s.center_of_mass() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn moment_sums_match_pairwise() {
        let x = [-0.7, -0.2, 0.05, 0.4, 0.9];
        for p in [2.0, 4.0, 6.0] {
            let mut fast = vec![0.0; 5];
            power_sums(&x, p, &mut fast);
            for (i, &xi) in x.iter().enumerate() {
                let direct: f64 = x
                    .iter()
                    .map(|&xj| (xi - xj).signum() * (xi - xj).abs().powf(p - 1.0))
                    .sum();
                assert!((fast[i] - direct).abs() < 1e-12, "{p} {i}");
            }
        }
    }

    #[test]
    fn rejects_bad_config() {
        assert!(particle_simulate(&SimulationConfig::new(1.0, 2.0, 10)).is_err());
        assert!(particle_simulate(&SimulationConfig::new(2.0, 1.0, 1)).is_err());
    }
}
