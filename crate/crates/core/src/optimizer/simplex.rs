//! Box-constrained Nelder-Mead with dimension-adaptive coefficients.
//!
//! Trial points are projected onto the box. When the simplex collapses the
//! search is restarted around the best vertex; it stops once a restart no
//! longer improves the objective or the evaluation budget runs out.

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    pub max_evals: usize,
    /// Initial edge length per coordinate.
    pub step: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    /// Convergence on the spread of objective values across the simplex.
    pub f_tol: f64,
    /// Convergence on the simplex diameter (max coordinate distance to the best vertex).
    pub x_tol: f64,
    /// Stop as soon as the objective drops to this value.
    pub target: f64,
}

#[derive(Debug, Clone)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub evals: usize,
    pub converged: bool,
}

struct Counter<F> {
    f: F,
    evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> Counter<F> {
    fn call(&mut self, x: &[f64]) -> f64 {
        self.evals += 1;
        let v = (self.f)(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

fn project(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for ((xi, l), h) in x.iter_mut().zip(lo).zip(hi) {
        *xi = xi.clamp(*l, *h);
    }
}

pub fn minimize<F: FnMut(&[f64]) -> f64>(f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexOutcome {
    let dim = x0.len();
    let mut obj = Counter { f, evals: 0 };
    let mut best_x = x0.to_vec();
    project(&mut best_x, &opts.lower, &opts.upper);
    let mut best_f = obj.call(&best_x);
    let mut converged = false;
    let mut step_scale = 1.0;

    while obj.evals < opts.max_evals && best_f > opts.target {
        let (x, fx, collapsed) = run_simplex(&mut obj, &best_x, best_f, opts, step_scale);
        let improved = fx < best_f - 1e-15 * best_f.abs().max(1e-300);
        if fx <= best_f {
            best_x = x;
            best_f = fx;
        }
        if !collapsed {
            break;
        }
        if !improved {
            converged = true;
            break;
        }
        step_scale = (step_scale * 0.5).max(1e-3);
    }
    if dim == 0 {
        converged = true;
    }
    SimplexOutcome {
        x: best_x,
        f: best_f,
        evals: obj.evals,
        converged: converged || best_f <= opts.target,
    }
}

/// One Nelder-Mead run from a fresh simplex around `start`. Returns the best
/// vertex, its value, and whether the simplex collapsed (as opposed to the
/// budget or target ending the run).
fn run_simplex<F: FnMut(&[f64]) -> f64>(
    obj: &mut Counter<F>,
    start: &[f64],
    f_start: f64,
    opts: &SimplexOptions,
    step_scale: f64,
) -> (Vec<f64>, f64, bool) {
    let n = start.len();
    if n == 0 {
        return (start.to_vec(), f_start, true);
    }
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);

    let mut verts: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut vals: Vec<f64> = Vec::with_capacity(n + 1);
    verts.push(start.to_vec());
    vals.push(f_start);
    for i in 0..n {
        let mut v = start.to_vec();
        let h = opts.step[i] * step_scale;
        v[i] += h;
        if v[i] > opts.upper[i] {
            v[i] = start[i] - h;
        }
        project(&mut v, &opts.lower, &opts.upper);
        vals.push(obj.call(&v));
        verts.push(v);
    }

    let mut order: Vec<usize> = (0..=n).collect();
    loop {
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let (ib, iw, isw) = (order[0], order[n], order[n - 1]);
        if vals[ib] <= opts.target || obj.evals >= opts.max_evals {
            return (verts[ib].clone(), vals[ib], false);
        }
        let spread = vals[iw] - vals[ib];
        let diameter = verts
            .iter()
            .flat_map(|v| v.iter().zip(&verts[ib]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread <= opts.f_tol && diameter <= opts.x_tol {
            return (verts[ib].clone(), vals[ib], true);
        }
        if diameter <= 1e-14 {
            return (verts[ib].clone(), vals[ib], true);
        }

        let mut centroid = vec![0.0; n];
        for &i in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&verts[i]) {
                *c += x / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid.iter().zip(&verts[iw]).map(|(c, w)| c + t * (c - w)).collect();
            project(&mut p, &opts.lower, &opts.upper);
            p
        };

        let xr = along(alpha);
        let fr = obj.call(&xr);
        if fr < vals[ib] {
            let xe = along(alpha * gamma);
            let fe = obj.call(&xe);
            if fe < fr {
                verts[iw] = xe;
                vals[iw] = fe;
            } else {
                verts[iw] = xr;
                vals[iw] = fr;
            }
            continue;
        }
        if fr < vals[isw] {
            verts[iw] = xr;
            vals[iw] = fr;
            continue;
        }
        // outside contraction if the reflection helped at all, inside otherwise
        let xc = if fr < vals[iw] { along(alpha * rho) } else { along(-rho) };
        let fc = obj.call(&xc);
        if fc < vals[iw].min(fr) {
            verts[iw] = xc;
            vals[iw] = fc;
            continue;
        }
        // shrink towards the best vertex
        let best = verts[ib].clone();
        for &i in &order[1..] {
            let mut v: Vec<f64> = best.iter().zip(&verts[i]).map(|(b, x)| b + sigma * (x - b)).collect();
            project(&mut v, &opts.lower, &opts.upper);
            vals[i] = obj.call(&v);
            verts[i] = v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(dim: usize) -> SimplexOptions {
        SimplexOptions {
            max_evals: 20_000,
            step: vec![0.5; dim],
            lower: vec![-10.0; dim],
            upper: vec![10.0; dim],
            f_tol: 1e-16,
            x_tol: 1e-10,
            target: f64::NEG_INFINITY,
        }
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let out = minimize(f, &[-1.2, 1.0], &opts(2));
        assert!(out.f < 1e-12, "{}", out.f);
        assert!((out.x[0] - 1.0).abs() < 1e-5 && (out.x[1] - 1.0).abs() < 1e-5);
        assert!(out.converged);
    }

    #[test]
    fn respects_bounds() {
        let f = |x: &[f64]| (x[0] - 20.0).powi(2) + (x[1] + 3.0).powi(2);
        let out = minimize(f, &[0.0, 0.0], &opts(2));
        assert!((out.x[0] - 10.0).abs() < 1e-8);
        assert!((out.x[1] + 3.0).abs() < 1e-5);
    }

    #[test]
    fn budget_is_respected() {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let mut o = opts(6);
        o.max_evals = 50;
        let out = minimize(f, &[3.0; 6], &o);
        assert!(out.evals <= 50 + 7);
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + (x[1] * x[0] - 1.0).powi(2) + x[2].abs();
        let a = minimize(f, &[1.0, 2.0, 3.0], &opts(3));
        let b = minimize(f, &[1.0, 2.0, 3.0], &opts(3));
        assert_eq!(a.x, b.x);
        assert_eq!(a.f.to_bits(), b.f.to_bits());
    }
}
