use crate::chebyshev;
use crate::error::{invalid, Error, Result};
use crate::quadrature::kernel_integral;
use crate::solver::ProblemSpec;
use crate::ultraspherical::{BasisParam, Interval};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

const QUAD_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootSearchOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for RootSearchOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 60,
        }
    }
}

/// Measure ρ(x) = (1 − t²)^{λ+1/2} q(t) with q a Chebyshev series, found by
/// root search on its coefficients and support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSearchResult {
    pub support: Interval,
    pub energy: f64,
    /// Chebyshev coefficients of q.
    pub coeffs: Vec<f64>,
    /// Exponent of the boundary factor.
    pub exponent: f64,
    pub iterations: usize,
    pub residual: f64,
}

impl RootSearchResult {
    pub fn density(&self, x: f64) -> f64 {
        let t = self.support.to_local(x);
        if !(t.abs() < 1.0) {
            return 0.0;
        }
        ((1.0 - t) * (1.0 + t)).powf(self.exponent) * chebyshev::eval(&self.coeffs, t)
    }
}

fn cheb_t(k: usize, s: f64) -> f64 {
    (k as f64 * s.clamp(-1.0, 1.0).acos()).cos()
}

/// Independent solver for measures that vanish on the support boundary.
///
/// Solves V(x) − (1/α)∫|x−y|^α ρ(y)dy = E at m + 2 Chebyshev points together
/// with the mass condition, for the m coefficients of q, both endpoints and E.
/// Kernel moments come from double-exponential quadrature rather than the
/// operator recurrences, so agreement with the spectral solver is a genuine
/// cross-check. Only valid where the equilibrium measure vanishes at the
/// boundary.
pub fn root_search_measure(
    spec: &ProblemSpec,
    degree: usize,
    init: Interval,
    opts: RootSearchOptions,
) -> Result<RootSearchResult> {
    spec.validate()?;
    let pot = spec
        .potential
        .as_ref()
        .ok_or_else(|| invalid("root search needs an external potential"))?;
    if degree < 3 {
        return Err(invalid(format!(
            "root search needs at least 3 coefficients, got {degree}"
        )));
    }
    let alpha = spec.alpha.value();
    let lambda = spec.basis()?.lambda();
    let exponent = lambda + 0.5;
    let raised = BasisParam::new(lambda + 1.0)?;
    let m = degree;
    let nodes = chebyshev::nodes(m + 2);
    let mut moments = DMatrix::zeros(m + 2, m);
    for (j, &t) in nodes.iter().enumerate() {
        for k in 0..m {
            moments[(j, k)] = kernel_integral(alpha, raised, t, |s| cheb_t(k, s), QUAD_TOL)?;
        }
    }
    let mut masses = vec![0.0; m];
    for (k, v) in masses.iter_mut().enumerate() {
        *v = kernel_integral(0.0, raised, 0.0, |s| cheb_t(k, s), QUAD_TOL)?;
    }
    let mass = spec.mass;
    // unknowns: c_0..c_{m−1}, a, b, E
    let residual = |u: &[f64]| -> DVector<f64> {
        let (a, b, e) = (u[m], u[m + 1], u[m + 2]);
        let r = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let k = r.abs().powf(alpha + 1.0) / alpha;
        let mut f = DVector::zeros(m + 3);
        for (j, &t) in nodes.iter().enumerate() {
            let field: f64 = (0..m).map(|i| moments[(j, i)] * u[i]).sum();
            f[j] = pot.eval(mid + r * t) - k * field - e;
        }
        f[m + 2] = r * (0..m).map(|i| masses[i] * u[i]).sum::<f64>() - mass;
        f
    };

    // start from the least-squares fit with the support held fixed
    let (a0, b0) = (init.a, init.b);
    let r0 = init.half_width();
    let k0 = r0.powf(alpha + 1.0) / alpha;
    let lin = DMatrix::from_fn(m + 3, m + 1, |j, i| match (j < m + 2, i < m) {
        (true, true) => -k0 * moments[(j, i)],
        (true, false) => -1.0,
        (false, true) => r0 * masses[i],
        (false, false) => 0.0,
    });
    let rhs = DVector::from_fn(m + 3, |j, _| {
        if j < m + 2 {
            -pot.eval(init.to_global(nodes[j]))
        } else {
            mass
        }
    });
    let fit = lin
        .svd(true, true)
        .solve(&rhs, 1e-14)
        .map_err(|e| Error::IllPosed(e.to_string()))?;
    let mut u: Vec<f64> = fit.iter().take(m).copied().collect();
    u.extend([a0, b0, fit[m]]);

    let norm = |f: &DVector<f64>| f.amax();
    let mut f = residual(&u);
    let scale = 1.0 + mass.abs() + f.amax().min(1.0);
    for it in 0..opts.max_iter {
        if norm(&f) <= opts.tol * scale {
            return finish(u, m, exponent, it, norm(&f));
        }
        let mut jac = DMatrix::zeros(m + 3, m + 3);
        for i in 0..m + 3 {
            let h = 1e-7 * u[i].abs().max(1e-3);
            let mut up = u.clone();
            let mut dn = u.clone();
            up[i] += h;
            dn[i] -= h;
            let col = (residual(&up) - residual(&dn)) / (2.0 * h);
            jac.set_column(i, &col);
        }
        let step = jac
            .lu()
            .solve(&(-&f))
            .ok_or_else(|| Error::IllPosed("singular Jacobian in root search".into()))?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand: Vec<f64> = u.iter().zip(step.iter()).map(|(x, d)| x + t * d).collect();
            if cand[m + 1] > cand[m] {
                let fc = residual(&cand);
                if norm(&fc) < norm(&f) {
                    u = cand;
                    f = fc;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let res = norm(&f);
    if res <= 1e3 * opts.tol * scale {
        return finish(u, m, exponent, opts.max_iter, res);
    }
    Err(Error::NoConvergence { residual: res })
}

fn finish(
    u: Vec<f64>,
    m: usize,
    exponent: f64,
    iterations: usize,
    residual: f64,
) -> Result<RootSearchResult> {
    Ok(RootSearchResult {
        support: Interval::new(u[m], u[m + 1])?,
        energy: u[m + 2],
        coeffs: u[..m].to_vec(),
        exponent,
        iterations,
        residual,
    })
}
