//! Derivative-free and finite-difference minimizers used by the support search.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search on [lo, hi] for a unimodal f.
pub fn golden_section<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: usize,
) -> Minimum {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut it = 0;
    while (b - a).abs() > tol && it < max_iter {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        it += 1;
    }
    let (x, fx) = if fc < fd { (c, fc) } else { (d, fd) };
    Minimum {
        x: vec![x],
        f: fx,
        iterations: it,
        converged: (b - a).abs() <= tol,
    }
}

/// Newton iteration on f'(x) = 0 inside [lo, hi].
///
/// The derivative uses the five-point central stencil with step h, exact for
/// quartics, so h can be taken large enough to lift the derivative above the
/// rounding noise of f. A step that raises f by more than `slack` relative is
/// halved; non-convex models fall back to a golden-section step toward the
/// descent side.
pub fn newton_1d<F: FnMut(f64) -> f64>(
    mut f: F,
    x0: f64,
    bracket: (f64, f64),
    h: f64,
    tol: f64,
    max_iter: usize,
) -> Minimum {
    let (mut lo, mut hi) = bracket;
    let mut x = x0.clamp(lo, hi);
    let mut fx = f(x);
    let slack = 1e-13;
    let mut last_step = f64::INFINITY;
    let mut stalls = 0;
    for it in 0..max_iter {
        let h = h
            .min(0.25 * (x - bracket.0))
            .min(0.25 * (bracket.1 - x))
            .max(f64::EPSILON * x.abs().max(1.0));
        let (fm2, fm1, fp1, fp2) = (f(x - 2.0 * h), f(x - h), f(x + h), f(x + 2.0 * h));
        let g = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
        let curv = (fp1 - 2.0 * fx + fm1) / (h * h);
        if g > 0.0 {
            hi = hi.min(x);
        } else if g < 0.0 {
            lo = lo.max(x);
        }
        let mut cand = match (curv > 0.0).then(|| x - g / curv) {
            Some(y) if y >= lo && y <= hi => y,
            _ if g > 0.0 => x - (1.0 - INV_PHI) * (x - lo),
            _ => x + (1.0 - INV_PHI) * (hi - x),
        };
        let mut fc = f(cand);
        let mut backtracks = 0;
        while fc > fx + slack * fx.abs().max(1e-300) && backtracks < 40 {
            cand = x + 0.5 * (cand - x);
            fc = f(cand);
            backtracks += 1;
        }
        let step = (cand - x).abs();
        x = cand;
        fx = fc;
        // steps that stop shrinking mean rounding noise or a kink in f
        stalls = if step >= 0.5 * last_step {
            stalls + 1
        } else {
            0
        };
        if step <= tol || (hi - lo) <= tol || stalls >= 5 {
            return Minimum {
                x: vec![x],
                f: fx,
                iterations: it + 1,
                converged: true,
            };
        }
        last_step = step;
    }
    Minimum {
        x: vec![x],
        f: fx,
        iterations: max_iter,
        converged: false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    pub tol_x: f64,
    pub tol_f: f64,
    pub max_iter: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            tol_x: 1e-10,
            tol_f: 1e-15,
            max_iter: 2000,
        }
    }
}

/// Nelder–Mead simplex search with standard coefficients.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    opts: NelderMeadOptions,
) -> Minimum {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += step[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut it = 0;
    let mut converged = false;
    while it < opts.max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        let size = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        let spread = (values[n] - values[0]).abs();
        if size <= opts.tol_x || (spread <= opts.tol_f && size <= opts.tol_x.sqrt()) {
            converged = true;
            break;
        }
        it += 1;
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|v| v[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            (0..n)
                .map(|k| centroid[k] + t * (simplex[n][k] - centroid[k]))
                .collect()
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[n] {
            let x = along(-0.5);
            let v = f(&x);
            (x, v)
        } else {
            let x = along(0.5);
            let v = f(&x);
            (x, v)
        };
        if fc < values[n].min(fr) {
            simplex[n] = xc;
            values[n] = fc;
            continue;
        }
        // shrink toward the best vertex
        let best = simplex[0].clone();
        for i in 1..=n {
            for (v, b) in simplex[i].iter_mut().zip(&best) {
                *v = b + 0.5 * (*v - b);
            }
            values[i] = f(&simplex[i]);
        }
    }
    let best = (0..=n)
        .min_by(|&i, &j| values[i].total_cmp(&values[j]))
        .unwrap_or(0);
    Minimum {
        x: simplex[best].clone(),
        f: values[best],
        iterations: it,
        converged,
    }
}

/// Newton steps on a 2-D function with finite-difference derivatives.
///
/// Gradient by the five-point stencil, Hessian by central differences, both
/// with step h. Steps that raise f beyond rounding slack are halved; the
/// iterate is returned once the step falls below `tol` or stops shrinking.
pub fn newton_2d<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    h: f64,
    tol: f64,
    max_iter: usize,
) -> Minimum {
    let mut x = [x0[0], x0[1]];
    let mut fx = f(&x);
    let slack = 1e-13;
    let mut last_step = f64::INFINITY;
    for it in 0..max_iter {
        let mut at = |a: f64, b: f64| f(&[x[0] + a, x[1] + b]);
        let mut g = [0.0; 2];
        let mut diag = [0.0; 2];
        for i in 0..2 {
            let d = |s: f64| if i == 0 { (s, 0.0) } else { (0.0, s) };
            let v: Vec<f64> = [-2.0, -1.0, 1.0, 2.0]
                .iter()
                .map(|&k| {
                    let (a, b) = d(k * h);
                    at(a, b)
                })
                .collect();
            g[i] = (v[0] - 8.0 * v[1] + 8.0 * v[2] - v[3]) / (12.0 * h);
            diag[i] = (v[2] - 2.0 * fx + v[1]) / (h * h);
        }
        let h01 = (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4.0 * h * h);
        let det = diag[0] * diag[1] - h01 * h01;
        if !(det > 0.0 && diag[0] > 0.0) {
            return Minimum {
                x: x.to_vec(),
                f: fx,
                iterations: it,
                converged: false,
            };
        }
        let mut d = [
            -(diag[1] * g[0] - h01 * g[1]) / det,
            -(diag[0] * g[1] - h01 * g[0]) / det,
        ];
        let mut accepted = false;
        for _ in 0..40 {
            let cand = [x[0] + d[0], x[1] + d[1]];
            let fc = f(&cand);
            if fc <= fx + slack * fx.abs() {
                x = cand;
                fx = fc;
                accepted = true;
                break;
            }
            d = [0.5 * d[0], 0.5 * d[1]];
        }
        let step = d[0].abs().max(d[1].abs());
        if !accepted || step <= tol || (it > 2 && step >= last_step && step < 1e3 * tol) {
            return Minimum {
                x: x.to_vec(),
                f: fx,
                iterations: it + 1,
                converged: accepted || step <= tol,
            };
        }
        last_step = step;
    }
    Minimum {
        x: x.to_vec(),
        f: fx,
        iterations: max_iter,
        converged: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_quadratic() {
        let m = golden_section(|x| (x - 0.3).powi(2), -1.0, 2.0, 1e-10, 200);
        assert!((m.x[0] - 0.3).abs() < 1e-9);
    }

    #[test]
    fn newton_quartic() {
        let m = newton_1d(
            |x| (x - 1.2).powi(2) + 0.1 * (x - 1.2).powi(4),
            0.2,
            (0.0, 5.0),
            1e-3,
            1e-12,
            100,
        );
        assert!(m.converged && (m.x[0] - 1.2).abs() < 1e-8);
    }

    #[test]
    fn rosenbrock() {
        let f = |v: &[f64]| (1.0 - v[0]).powi(2) + 100.0 * (v[1] - v[0] * v[0]).powi(2);
        let m = nelder_mead(f, &[-1.2, 1.0], &[0.1, 0.1], NelderMeadOptions::default());
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6);
        let p = newton_2d(f, &m.x, 1e-5, 1e-12, 20);
        assert!((p.x[0] - 1.0).abs() < 1e-7);
    }
}
